//! Edit extraction, subtree merging, candidate selection and test-driven
//! minimisation of repairs.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::encoding::TokenSequence;
use crate::frontend::{Ast, NodeId, Token, TokenKind};
use crate::matching::Alignment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("no validated candidate repair")]
    NoCandidate,
    #[error("edits at {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("edit at {location} does not match the program tokens")]
    Mismatch { location: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditKind {
    Insert,
    Delete,
    Update,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Insert => "insert",
            EditKind::Delete => "delete",
            EditKind::Update => "update",
        }
    }

    fn of(removed: &[Token], inserted: &[Token]) -> EditKind {
        match (removed.is_empty(), inserted.is_empty()) {
            (true, _) => EditKind::Insert,
            (false, true) => EditKind::Delete,
            (false, false) => EditKind::Update,
        }
    }
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub kind: EditKind,
    /// Token index into the program being repaired.
    pub location: usize,
    pub removed: Vec<Token>,
    pub inserted: Vec<Token>,
    /// Token index into the reference program where `inserted` starts.
    pub target: usize,
}

impl Edit {
    pub fn new(location: usize, removed: Vec<Token>, inserted: Vec<Token>, target: usize) -> Self {
        Edit {
            kind: EditKind::of(&removed, &inserted),
            location,
            removed,
            inserted,
            target,
        }
    }

    /// One past the last removed token.
    pub fn end(&self) -> usize {
        self.location + self.removed.len()
    }
}

pub fn join_lexemes(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.lexeme.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EditKind::Insert => write!(f, "insert \"{}\" at {}", join_lexemes(&self.inserted), self.location),
            EditKind::Delete => write!(f, "delete \"{}\" at {}", join_lexemes(&self.removed), self.location),
            EditKind::Update => write!(
                f,
                "update \"{}\" to \"{}\" at {}",
                join_lexemes(&self.removed),
                join_lexemes(&self.inserted),
                self.location
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Repair {
    pub edits: Vec<Edit>,
    pub candidate_id: String,
}

impl Repair {
    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }
}

/// Turns the unmatched runs between anchors into edits. Anchors are aligned
/// pairs with identical lexemes; aligned pairs whose lexemes still differ
/// after renaming are edited like unmatched tokens.
pub fn extract_edits(p_i: &TokenSequence, p_jp: &TokenSequence, align: &Alignment) -> Repair {
    let (a, b) = (&p_i.tokens, &p_jp.tokens);
    let anchors = align
        .pairs
        .iter()
        .copied()
        .filter(|&(l, r)| a[l].lexeme == b[r].lexeme)
        .chain(std::iter::once((a.len(), b.len())));
    let mut edits = Vec::new();
    let (mut li, mut ri) = (0, 0);
    for (l, r) in anchors {
        if l > li || r > ri {
            edits.push(Edit::new(li, a[li..l].to_vec(), b[ri..r].to_vec(), ri));
        }
        li = l + 1;
        ri = r + 1;
    }
    Repair {
        edits,
        candidate_id: align.right_id.clone(),
    }
}

/// Inclusive token-index range covered by each node, `None` for leafless nodes.
fn leaf_ranges(ast: &Ast, seq: &TokenSequence) -> Vec<Option<(usize, usize)>> {
    let index: HashMap<NodeId, usize> = seq.leaf_ids.iter().enumerate().map(|(k, &l)| (l, k)).collect();
    let mut ranges = vec![None; ast.len()];
    for id in ast.postorder() {
        let node = ast.node(id);
        ranges[id] = if node.is_leaf() {
            index.get(&id).map(|&k| (k, k))
        } else {
            node.children
                .iter()
                .filter_map(|&c| ranges[c])
                .fold(None, |acc: Option<(usize, usize)>, (s, e)| match acc {
                    None => Some((s, e)),
                    Some((s0, e0)) => Some((s0.min(s), e0.max(e))),
                })
        };
    }
    ranges
}

/// The p_i leaf an insert is attached to: the neighbour on the side that
/// shares the inserted run's smallest enclosing subtree in the reference.
fn attachment(edit: &Edit, n_i: usize, ast_jp: &Ast, seq_jp: &TokenSequence, ranges_jp: &[Option<(usize, usize)>]) -> Option<usize> {
    if edit.kind != EditKind::Insert || edit.inserted.is_empty() {
        return None;
    }
    let (r0, r1) = (edit.target, edit.target + edit.inserted.len());
    let first_leaf = *seq_jp.leaf_ids.get(r0)?;
    let lca = std::iter::once(first_leaf)
        .chain(ast_jp.ancestors(first_leaf))
        .find(|&n| ranges_jp[n].is_some_and(|(_, e)| e + 1 >= r1))?;
    let (s, e) = ranges_jp[lca]?;
    if r0 >= 1 && s < r0 && edit.location >= 1 {
        Some(edit.location - 1)
    } else if e >= r1 && r1 < seq_jp.len() && edit.location < n_i {
        Some(edit.location)
    } else {
        None
    }
}

/// Applies `edits` (sorted, non-overlapping) to `tokens[s..e]`, keeping the
/// inserts that sit at either boundary.
fn splice(tokens: &[Token], s: usize, e: usize, edits: &[&Edit]) -> Vec<Token> {
    let mut out = Vec::new();
    let mut pos = s;
    for ed in edits {
        out.extend_from_slice(&tokens[pos..ed.location.max(pos)]);
        out.extend(ed.inserted.iter().cloned());
        pos = pos.max(ed.end());
    }
    out.extend_from_slice(&tokens[pos.min(e)..e]);
    out
}

/// Replaces groups of small edits that together touch more than half of the
/// leaves of some subtree of `ast_i` by one update of that subtree.
pub fn refine_edits(r: &Repair, ast_i: &Ast, seq_i: &TokenSequence, ast_jp: &Ast, seq_jp: &TokenSequence) -> Repair {
    let n_i = seq_i.len();
    let ranges_i = leaf_ranges(ast_i, seq_i);
    let ranges_jp = leaf_ranges(ast_jp, seq_jp);
    let mut edits: Vec<(Edit, Option<usize>)> = r
        .edits
        .iter()
        .map(|e| (e.clone(), attachment(e, n_i, ast_jp, seq_jp, &ranges_jp)))
        .collect();
    // A merged range counts as a single modified unit for its ancestors,
    // otherwise one merge would spread to every enclosing subtree.
    let mut marked = vec![false; n_i];
    for (ed, att) in &edits {
        marked[ed.location.min(n_i)..ed.end().min(n_i)].fill(true);
        if let Some(k) = att {
            marked[*k] = true;
        }
    }
    let mut unit: Vec<usize> = (0..n_i).collect();
    for id in ast_i.postorder() {
        let Some((s, e)) = ranges_i[id] else { continue };
        let (mut size, mut hits) = (0, 0);
        for k in s..=e {
            if k == s || unit[k] != unit[k - 1] {
                size += 1;
                hits += marked[k] as usize;
            }
        }
        if hits * 2 <= size {
            continue;
        }
        // Grow [lo, hi) until it absorbs every edit it touches.
        let (mut lo, mut hi) = (s, e + 1);
        let mut touched = vec![false; edits.len()];
        loop {
            let mut grew = false;
            for (k, (ed, att)) in edits.iter().enumerate() {
                if touched[k] {
                    continue;
                }
                let hit = if ed.removed.is_empty() {
                    (lo..=hi).contains(&ed.location) || att.is_some_and(|a| (lo..hi).contains(&a))
                } else {
                    ed.location < hi && ed.end() > lo
                };
                if hit {
                    touched[k] = true;
                    lo = lo.min(ed.location);
                    hi = hi.max(ed.end());
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let group: Vec<&Edit> = edits
            .iter()
            .zip(&touched)
            .filter(|(_, &t)| t)
            .map(|((ed, _), _)| ed)
            .collect();
        if group.len() == 1 && group[0].location == lo && group[0].end() == hi {
            continue;
        }
        let first = group[0];
        let merged = Edit::new(
            lo,
            seq_i.tokens[lo..hi].to_vec(),
            splice(&seq_i.tokens, lo, hi, &group),
            first.target - (first.location - lo),
        );
        let mut next: Vec<(Edit, Option<usize>)> = edits
            .iter()
            .zip(&touched)
            .filter(|(_, &t)| !t)
            .map(|(x, _)| x.clone())
            .collect();
        marked[lo..hi].fill(true);
        unit[lo..hi].fill(lo);
        let at = next.partition_point(|(ed, _)| ed.location < merged.location);
        next.insert(at, (merged, None));
        edits = next;
    }
    Repair {
        edits: edits.into_iter().map(|(e, _)| e).collect(),
        candidate_id: r.candidate_id.clone(),
    }
}

/// Fewest edits wins; ties go to the earliest (highest ranked) candidate.
pub fn select_candidate(candidates: Vec<Repair>) -> Result<Repair, RepairError> {
    let mut best: Option<Repair> = None;
    for c in candidates {
        if best.as_ref().is_none_or(|b| c.len() < b.len()) {
            best = Some(c);
        }
    }
    best.ok_or(RepairError::NoCandidate)
}

pub fn apply_edits(p_i: &TokenSequence, edits: &[Edit]) -> Result<TokenSequence, RepairError> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.location, e.kind != EditKind::Insert));
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        let same_insert = a.location == b.location && a.removed.is_empty() && b.removed.is_empty();
        if a.end() > b.location || same_insert {
            return Err(RepairError::Overlap {
                first: a.location,
                second: b.location,
            });
        }
    }
    let toks = &p_i.tokens;
    for e in &sorted {
        let ok = e.end() <= toks.len()
            && toks[e.location..e.end()]
                .iter()
                .zip(&e.removed)
                .all(|(x, y)| x.lexeme == y.lexeme);
        if !ok {
            return Err(RepairError::Mismatch { location: e.location });
        }
    }
    Ok(TokenSequence::from_tokens(
        splice(toks, 0, toks.len(), &sorted),
        p_i.origin.clone(),
    ))
}

/// Lays tokens out as compilable source, one statement or directive per line.
pub fn render(tokens: &TokenSequence) -> String {
    let mut out = String::new();
    let mut line_start = true;
    for t in &tokens.tokens {
        if t.lexeme == "#" && t.kind == TokenKind::Punctuation {
            if !line_start {
                out.push('\n');
            }
        } else if !line_start {
            out.push(' ');
        }
        out.push_str(&t.lexeme);
        line_start = false;
        if matches!(t.lexeme.as_str(), ";" | "{" | "}") && t.kind == TokenKind::Punctuation
            || t.kind == TokenKind::Filename
        {
            out.push('\n');
            line_start = true;
        }
    }
    if !line_start {
        out.push('\n');
    }
    out
}

/// Test oracle used by [`minimize`].
pub trait Oracle {
    type Error;
    fn passes(&self, tokens: &TokenSequence) -> Result<bool, Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Single,
    LeaveOneOut,
    Validate,
    LeaveTwoOut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub stage: Stage,
    /// Indices into the input repair's edits that were applied.
    pub subset: Vec<usize>,
    pub passed: bool,
    /// False when the outcome came from an earlier identical trial.
    pub judged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimized {
    pub repair: Repair,
    pub trials: Vec<Trial>,
}

impl Minimized {
    pub fn judge_calls(&self) -> usize {
        self.trials.iter().filter(|t| t.judged).count()
    }
}

struct Trials<'a, O: Oracle> {
    p_i: &'a TokenSequence,
    edits: &'a [Edit],
    oracle: &'a O,
    known: HashMap<Vec<usize>, bool>,
    log: Vec<Trial>,
    budget: usize,
}

impl<O: Oracle> Trials<'_, O> {
    fn calls(&self) -> usize {
        self.log.iter().filter(|t| t.judged).count()
    }

    fn exhausted(&self) -> bool {
        self.calls() >= self.budget
    }

    fn test(&mut self, stage: Stage, subset: Vec<usize>) -> Result<bool, O::Error> {
        if let Some(&passed) = self.known.get(&subset) {
            self.log.push(Trial { stage, subset, passed, judged: false });
            return Ok(passed);
        }
        let chosen: Vec<Edit> = subset.iter().map(|&k| self.edits[k].clone()).collect();
        let passed = match apply_edits(self.p_i, &chosen) {
            Ok(tokens) => self.oracle.passes(&tokens)?,
            Err(_) => false,
        };
        self.known.insert(subset.clone(), passed);
        self.log.push(Trial { stage, subset, passed, judged: true });
        Ok(passed)
    }
}

/// Shrinks `r_s` with single-edit, leave-one-out and leave-two-out trials.
/// At most `3n - 1` oracle calls are made for `n` edits.
pub fn minimize<O: Oracle>(r_s: &Repair, p_i: &TokenSequence, oracle: &O) -> Result<Minimized, O::Error> {
    let n = r_s.edits.len();
    let build = |keep: &[usize], log: Vec<Trial>| Minimized {
        repair: Repair {
            edits: keep.iter().map(|&k| r_s.edits[k].clone()).collect(),
            candidate_id: r_s.candidate_id.clone(),
        },
        trials: log,
    };
    if n == 0 {
        return Ok(build(&[], Vec::new()));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut t = Trials {
        p_i,
        edits: &r_s.edits,
        oracle,
        known: HashMap::new(),
        log: Vec::new(),
        budget: 3 * n - 1,
    };
    // The full repair is validated by the caller and the bare program is
    // known to fail.
    t.known.insert(all.clone(), true);
    t.known.insert(Vec::new(), false);

    for k in 0..n {
        if t.test(Stage::Single, vec![k])? {
            return Ok(build(&[k], t.log));
        }
    }
    if n == 1 {
        return Ok(build(&all, t.log));
    }

    let mut removable = Vec::new();
    for k in 0..n {
        let subset: Vec<usize> = all.iter().copied().filter(|&x| x != k).collect();
        if t.test(Stage::LeaveOneOut, subset)? {
            removable.push(k);
        }
    }
    let without = |drop: &[usize]| -> Vec<usize> { all.iter().copied().filter(|x| !drop.contains(x)).collect() };
    let mut current = without(&removable);
    if removable.len() >= 2 {
        while removable.len() >= 2 && !t.exhausted() {
            if t.test(Stage::Validate, without(&removable))? {
                break;
            }
            removable.pop();
        }
        if removable.len() >= 2 && t.exhausted() && !t.known.get(&without(&removable)).copied().unwrap_or(false) {
            removable.truncate(1);
        }
        current = without(&removable);
    }

    if current.len() >= 3 {
        let mut i = 0;
        while i + 1 < current.len() && current.len() >= 3 && !t.exhausted() {
            let (a, b) = (current[i], current[i + 1]);
            let subset: Vec<usize> = current.iter().copied().filter(|&x| x != a && x != b).collect();
            if t.test(Stage::LeaveTwoOut, subset.clone())? {
                current = subset;
            } else {
                i += 1;
            }
        }
    }
    Ok(build(&current, t.log))
}
