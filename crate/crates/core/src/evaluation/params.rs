use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::treebank::DEFAULT_JOIN;

/// Scoring parameters in the spirit of evalb `.prm` files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalParams {
    pub delete_labels: BTreeSet<String>,
    /// Label to canonical representative. Always already transitively resolved.
    pub eq_labels: BTreeMap<String, String>,
    /// Drop functional suffixes such as `-SBJ` or `=2` before comparing.
    pub strip_functional: bool,
    #[serde(skip)]
    pub join: char,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            delete_labels: BTreeSet::new(),
            eq_labels: BTreeMap::new(),
            strip_functional: true,
            join: DEFAULT_JOIN,
        }
    }
}

impl EvalParams {
    /// Approximation of the COLLINS.prm constituent settings.
    pub fn collins() -> Self {
        Self::from_prm(include_str!("collins.prm")).expect("bundled parameter file parses").0
    }

    /// Parses `DELETE_LABEL X` and `EQ_LABEL A B` lines. Other directives are
    /// returned as warnings and otherwise ignored; `#` starts a comment.
    pub fn from_prm(text: &str) -> Result<(EvalParams, Vec<String>), EvalError> {
        let mut params = EvalParams::default();
        let mut warnings = Vec::new();
        let mut pairs = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |message: &str| EvalError::BadParams { line: k + 1, message: message.to_string() };
            match fields[0] {
                "DELETE_LABEL" => match fields.as_slice() {
                    [_, label] => {
                        params.delete_labels.insert(label.to_string());
                    }
                    _ => return Err(bad("DELETE_LABEL takes one label")),
                },
                "EQ_LABEL" => match fields.as_slice() {
                    [_, a, b] => pairs.push((a.to_string(), b.to_string())),
                    _ => return Err(bad("EQ_LABEL takes two labels")),
                },
                other => {
                    let w = format!("line {}: ignoring unsupported directive {other}", k + 1);
                    log::warn!("{w}");
                    warnings.push(w);
                }
            }
        }
        for (a, b) in pairs {
            params.add_equivalence(&a, &b);
        }
        Ok((params, warnings))
    }

    /// Declares `a` and `b` equivalent. Classes are represented by their
    /// lexicographically smallest member.
    pub fn add_equivalence(&mut self, a: &str, b: &str) {
        let ra = self.canonical(a);
        let rb = self.canonical(b);
        let rep = ra.clone().min(rb.clone());
        for v in self.eq_labels.values_mut() {
            if *v == ra || *v == rb {
                *v = rep.clone();
            }
        }
        for label in [a, b, &ra, &rb] {
            if label != rep {
                self.eq_labels.insert(label.to_string(), rep.clone());
            }
        }
    }

    fn canonical(&self, label: &str) -> String {
        self.eq_labels.get(label).cloned().unwrap_or_else(|| label.to_string())
    }

    /// Label after functional-tag stripping and equivalence mapping.
    pub fn normalize<'a>(&'a self, label: &'a str) -> &'a str {
        let base = if self.strip_functional { strip_functional(label) } else { label };
        self.eq_labels.get(base).map(String::as_str).unwrap_or(base)
    }

    pub fn is_deleted(&self, label: &str) -> bool {
        self.delete_labels.contains(label) || self.delete_labels.contains(self.normalize(label))
    }
}

/// `NP-SBJ-1` -> `NP`, `NP=2` -> `NP`. Labels that start with `-` (e.g. `-NONE-`) are kept.
fn strip_functional(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.char_indices().skip(1).find(|(_, c)| *c == '-' || *c == '=') {
        Some((i, _)) => &label[..i],
        None => label,
    }
}
