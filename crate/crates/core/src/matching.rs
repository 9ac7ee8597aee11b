//! Candidate retrieval by naive LCS similarity and minimum-cost LCS embedding.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::encoding::{EnhancedSequence, TokenSequence};
use crate::frontend::{Token, TokenKind, TokenRole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("similarity of two empty sequences is undefined")]
    EmptyInput,
    #[error("corpus has no correct solutions")]
    EmptyCorpus,
    #[error("fragment {l}..={r} out of range for sequence of length {len}")]
    IndexOutOfRange { l: usize, r: usize, len: usize },
    #[error("token subsequence cannot be embedded in the target sequence")]
    Unrealizable,
}

/// Ordered matched index pairs between two sequences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    pub left_id: String,
    pub right_id: String,
}

impl Alignment {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn compatible(a: &Token, b: &Token) -> bool {
    let plain = |t: &Token| t.kind == TokenKind::Identifier && t.role == TokenRole::Plain;
    (plain(a) && plain(b)) || (a.kind == b.kind && a.lexeme == b.lexeme)
}

/// Suffix LCS table: `t[i][j]` is the LCS length of `a[i..]` and `b[j..]`.
fn suffix_table(a: &[Token], b: &[Token]) -> Vec<Vec<u32>> {
    let (n, m) = (a.len(), b.len());
    let mut t = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            t[i][j] = if compatible(&a[i], &b[j]) {
                t[i + 1][j + 1] + 1
            } else {
                t[i + 1][j].max(t[i][j + 1])
            };
        }
    }
    t
}

/// A maximum-length common subsequence under [`compatible`], preferring
/// matches at the smallest indices.
pub fn naive_lcs(s_i: &TokenSequence, s_j: &TokenSequence) -> Alignment {
    let (a, b) = (&s_i.tokens, &s_j.tokens);
    let t = suffix_table(a, b);
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::with_capacity(t[0][0] as usize);
    while i < a.len() && j < b.len() {
        if compatible(&a[i], &b[j]) && t[i][j] == t[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if t[i + 1][j] == t[i][j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Alignment {
        pairs,
        left_id: s_i.origin.clone(),
        right_id: s_j.origin.clone(),
    }
}

/// LCS length only, in linear memory.
pub fn lcs_length(a: &[Token], b: &[Token]) -> usize {
    let mut prev = vec![0u32; b.len() + 1];
    let mut cur = vec![0u32; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if compatible(x, y) {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()] as usize
}

/// Exact similarity `lcs / ((n + m) / 2)`, kept as a ratio for exact ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Similarity {
    pub lcs: usize,
    pub total_len: usize,
}

impl Similarity {
    pub fn value(self) -> f64 {
        2.0 * self.lcs as f64 / self.total_len as f64
    }
}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.lcs as u128 * other.total_len as u128;
        let r = other.lcs as u128 * self.total_len as u128;
        l.cmp(&r)
    }
}

pub fn similarity(s_i: &TokenSequence, s_j: &TokenSequence) -> Result<Similarity, MatchError> {
    let total_len = s_i.len() + s_j.len();
    if total_len == 0 {
        return Err(MatchError::EmptyInput);
    }
    Ok(Similarity {
        lcs: lcs_length(&s_i.tokens, &s_j.tokens),
        total_len,
    })
}

/// Ranks `corpus` entries by descending similarity to `p_i` (ties by
/// ascending id) and keeps the first `limit`.
pub fn retrieve_candidates(
    p_i: &TokenSequence,
    corpus: &[(&str, &TokenSequence)],
    limit: usize,
) -> Result<Vec<(String, Similarity)>, MatchError> {
    if corpus.is_empty() {
        return Err(MatchError::EmptyCorpus);
    }
    let mut scored: Vec<(String, Similarity)> = corpus
        .par_iter()
        .map(|(id, seq)| {
            let sim = similarity(p_i, seq).unwrap_or(Similarity { lcs: 0, total_len: 1 });
            (id.to_string(), sim)
        })
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(limit);
    Ok(scored)
}

/// Arrows strictly inside the fragment `l..=r`; zero for an empty fragment.
pub fn gap_cost(e: &EnhancedSequence, l: usize, r: usize) -> Result<u64, MatchError> {
    if l > r {
        return Ok(0);
    }
    if r >= e.len() {
        return Err(MatchError::IndexOutOfRange { l, r, len: e.len() });
    }
    Ok(e.prefix(r) - e.prefix(l))
}

fn gap(e: &EnhancedSequence, l: usize, r: usize) -> i64 {
    if l > r {
        0
    } else {
        (e.prefix(r) - e.prefix(l)) as i64
    }
}

const INF: i64 = i64::MAX / 4;

/// Embeds `a_lcs` into `e` minimising the total arrow count inside unmatched
/// fragments. Ties resolve towards the smallest predecessor index.
pub fn optimal_embed(a_lcs: &[Token], e: &EnhancedSequence) -> Result<(Vec<usize>, u64), MatchError> {
    let (m, n) = (a_lcs.len(), e.len());
    if m == 0 {
        return Ok((Vec::new(), if n == 0 { 0 } else { gap(e, 0, n - 1) as u64 }));
    }
    if n < m {
        return Err(MatchError::Unrealizable);
    }
    let toks = &e.tokens.tokens;
    let mut cost = vec![INF; m * n];
    let mut prev = vec![usize::MAX; m * n];
    for q in 0..n {
        if compatible(&a_lcs[0], &toks[q]) {
            cost[q] = if q == 0 { 0 } else { gap(e, 0, q - 1) };
        }
    }
    for p in 1..m {
        let (done, rest) = cost.split_at_mut(p * n);
        let last = &done[(p - 1) * n..];
        let row = &mut rest[..n];
        // Running minimum of last[k] - P[k+1] over k <= q-2.
        let mut best = INF;
        let mut best_k = usize::MAX;
        for q in 1..n {
            if q >= 2 {
                let k = q - 2;
                if last[k] < INF {
                    let v = last[k] - e.prefix(k + 1) as i64;
                    if v < best {
                        best = v;
                        best_k = k;
                    }
                }
            }
            if !compatible(&a_lcs[p], &toks[q]) {
                continue;
            }
            let mut c = INF;
            let mut arg = usize::MAX;
            if best < INF {
                c = best + e.prefix(q - 1) as i64;
                arg = best_k;
            }
            if last[q - 1] < c {
                c = last[q - 1];
                arg = q - 1;
            }
            if c < INF {
                row[q] = c;
                prev[p * n + q] = arg;
            }
        }
    }
    let last = &cost[(m - 1) * n..];
    let mut total = INF;
    let mut end = usize::MAX;
    for (q, &cq) in last.iter().enumerate() {
        if cq < INF {
            let c = cq + if q + 1 < n { gap(e, q + 1, n - 1) } else { 0 };
            if c < total {
                total = c;
                end = q;
            }
        }
    }
    if end == usize::MAX {
        return Err(MatchError::Unrealizable);
    }
    let mut emb = vec![0; m];
    let mut q = end;
    for p in (0..m).rev() {
        emb[p] = q;
        if p > 0 {
            q = prev[p * n + q];
        }
    }
    Ok((emb, total as u64))
}

/// Naive LCS re-embedded at minimum cost into both sides, paired positionally.
pub fn best_alignment(p_i: &EnhancedSequence, p_j: &EnhancedSequence) -> Result<Alignment, MatchError> {
    let naive = naive_lcs(&p_i.tokens, &p_j.tokens);
    let a_lcs: Vec<Token> = naive
        .pairs
        .iter()
        .map(|&(l, _)| p_i.tokens.tokens[l].clone())
        .collect();
    let (left, _) = optimal_embed(&a_lcs, p_i)?;
    let (right, _) = optimal_embed(&a_lcs, p_j)?;
    Ok(Alignment {
        pairs: left.into_iter().zip(right).collect(),
        left_id: naive.left_id,
        right_id: naive.right_id,
    })
}
