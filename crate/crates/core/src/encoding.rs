//! Token sequences and their depth-arrow enhanced form.

use crate::frontend::{Ast, NodeId, Token};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
    pub origin: String,
    /// AST leaf id of each token; empty for sequences not derived from a tree.
    pub leaf_ids: Vec<NodeId>,
}

impl TokenSequence {
    pub fn from_tokens(tokens: Vec<Token>, origin: impl Into<String>) -> Self {
        TokenSequence {
            tokens,
            origin: origin.into(),
            leaf_ids: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lexemes(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.lexeme.as_str()).collect()
    }
}

/// A token sequence plus the arrow count between each adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnhancedSequence {
    pub tokens: TokenSequence,
    pub gap_arrows: Vec<u32>,
    /// `prefix[k]` is the sum of `gap_arrows[..k]`.
    prefix: Vec<u64>,
}

impl EnhancedSequence {
    /// Builds a sequence from explicit arrows; `gap_arrows.len()` must be
    /// `len - 1` (or 0 for an empty sequence).
    pub fn from_parts(tokens: TokenSequence, gap_arrows: Vec<u32>) -> Self {
        assert_eq!(
            gap_arrows.len(),
            tokens.len().saturating_sub(1),
            "one arrow count per adjacent token pair"
        );
        let mut prefix = Vec::with_capacity(gap_arrows.len() + 1);
        let mut acc = 0u64;
        prefix.push(0);
        for &a in &gap_arrows {
            acc += u64::from(a);
            prefix.push(acc);
        }
        EnhancedSequence {
            tokens,
            gap_arrows,
            prefix,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Arrows strictly inside positions `0..=k`; defined for `k < len`.
    pub(crate) fn prefix(&self, k: usize) -> u64 {
        self.prefix[k]
    }

    pub fn total_arrows(&self) -> u64 {
        self.prefix.last().copied().unwrap_or(0)
    }
}

pub fn token_sequence(ast: &Ast) -> TokenSequence {
    let leaf_ids = ast.leaves();
    let tokens = leaf_ids
        .iter()
        .map(|&l| ast.node(l).token.clone().expect("leaf carries a token"))
        .collect();
    TokenSequence {
        tokens,
        origin: ast.source_id().to_string(),
        leaf_ids,
    }
}

pub fn enhance(ast: &Ast) -> EnhancedSequence {
    let seq = token_sequence(ast);
    let arrows = seq
        .leaf_ids
        .windows(2)
        .map(|w| {
            let (a, b) = (ast.node(w[0]), ast.node(w[1]));
            let diff = a.depth.abs_diff(b.depth);
            if diff == 0 && ast.statement_of(w[0]) != ast.statement_of(w[1]) {
                2
            } else {
                diff
            }
        })
        .collect();
    EnhancedSequence::from_parts(seq, arrows)
}
