//! Identifier-map inference and candidate renaming.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::encoding::TokenSequence;
use crate::frontend::{Ast, Token};
use crate::matching::Alignment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapThresholds {
    pub min_confidence: f64,
    pub min_count: usize,
}

impl Default for MapThresholds {
    fn default() -> Self {
        MapThresholds {
            min_confidence: 0.6,
            min_count: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapEntry {
    /// Name in the candidate program.
    pub from_name: String,
    /// Name in the program being repaired.
    pub to_name: String,
    pub count: usize,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentifierMap {
    pub entries: Vec<MapEntry>,
}

impl IdentifierMap {
    pub fn get(&self, from: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.from_name == from)
            .map(|e| e.to_name.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A map from explicit `(from, to)` pairs, mainly for tests and tools.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        IdentifierMap {
            entries: pairs
                .into_iter()
                .map(|(f, t)| MapEntry {
                    from_name: f.to_string(),
                    to_name: t.to_string(),
                    count: 0,
                    confidence: 1.0,
                })
                .collect(),
        }
    }
}

/// Counts the plain-identifier pairs of `m` (right name → left name) and keeps
/// the confident, frequent, conflict-free ones.
pub fn infer_identifier_map(
    m: &Alignment,
    left: &TokenSequence,
    right: &TokenSequence,
    thresholds: MapThresholds,
) -> IdentifierMap {
    let mut counts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for &(l, r) in &m.pairs {
        let (a, b) = (&left.tokens[l], &right.tokens[r]);
        if a.is_plain_identifier() && b.is_plain_identifier() {
            *counts
                .entry(b.lexeme.as_str())
                .or_default()
                .entry(a.lexeme.as_str())
                .or_default() += 1;
        }
    }
    let mut survivors = Vec::new();
    for (from, alts) in &counts {
        let total: usize = alts.values().sum();
        for (to, &count) in alts {
            let confidence = count as f64 / total as f64;
            if confidence >= thresholds.min_confidence && count >= thresholds.min_count {
                survivors.push(MapEntry {
                    from_name: from.to_string(),
                    to_name: to.to_string(),
                    count,
                    confidence,
                });
            }
        }
    }
    survivors.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.from_name.cmp(&b.from_name))
            .then_with(|| a.to_name.cmp(&b.to_name))
    });
    let mut used_from = HashSet::new();
    let mut used_to = HashSet::new();
    let mut entries = Vec::new();
    for e in survivors {
        if used_from.contains(&e.from_name) || used_to.contains(&e.to_name) {
            continue;
        }
        used_from.insert(e.from_name.clone());
        used_to.insert(e.to_name.clone());
        entries.push(e);
    }
    IdentifierMap { entries }
}

/// Renames plain identifiers of `p_j` through `map`.
pub fn transform(p_j: &Ast, map: &IdentifierMap) -> Ast {
    let lookup: HashMap<&str, &str> = map
        .entries
        .iter()
        .map(|e| (e.from_name.as_str(), e.to_name.as_str()))
        .collect();
    p_j.map_tokens(|t| match lookup.get(t.lexeme.as_str()) {
        Some(to) if t.is_plain_identifier() => Token {
            lexeme: to.to_string(),
            ..t.clone()
        },
        _ => t.clone(),
    })
}
