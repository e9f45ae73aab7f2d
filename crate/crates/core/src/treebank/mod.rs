//! Constituent trees, bracketed treebank I/O and unary-chain normalization.

mod bracket;
mod unary;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bracket::{escape_token, parse_bracketed, parse_bracketed_with, serialize, unescape_token, ReadOptions};
pub use unary::{collapse_unary, expand_unary, DEFAULT_JOIN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreebankError {
    #[error("unbalanced brackets at byte {offset}")]
    UnbalancedBrackets { offset: usize },
    #[error("empty constituent at byte {offset}")]
    EmptyConstituent { offset: usize },
    #[error("tree has no terminals (byte {offset})")]
    NoTerminals { offset: usize },
    #[error("unexpected input after tree at byte {offset}")]
    TrailingInput { offset: usize },
    #[error("label {label:?} already contains join character {join:?}")]
    JoinCharacterCollision { label: String, join: char },
    #[error("invalid tree: {0}")]
    Invalid(String),
}

/// A tokenized sentence, optionally carrying one POS tag per token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub pos_tags: Option<Vec<String>>,
}

impl Sentence {
    pub fn new(tokens: Vec<String>) -> Self {
        Sentence { tokens, pos_tags: None }
    }

    pub fn from_words(words: &[&str]) -> Self {
        Self::new(words.iter().map(|w| w.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The first `m` tokens (and tags).
    pub fn prefix(&self, m: usize) -> Sentence {
        let m = m.min(self.len());
        Sentence {
            tokens: self.tokens[..m].to_vec(),
            pos_tags: self.pos_tags.as_ref().map(|p| p[..m].to_vec()),
        }
    }

    pub fn pos(&self, i: usize) -> Option<&str> {
        self.pos_tags.as_ref().and_then(|p| p.get(i)).map(String::as_str)
    }
}

/// A tree node. Terminals hold the 0-based position of their token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreeNode {
    Terminal(usize),
    NonTerminal { label: String, children: Vec<TreeNode> },
}

impl TreeNode {
    pub fn node(label: impl Into<String>, children: Vec<TreeNode>) -> TreeNode {
        TreeNode::NonTerminal { label: label.into(), children }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, TreeNode::Terminal(_))
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            TreeNode::Terminal(_) => None,
            TreeNode::NonTerminal { label, .. } => Some(label),
        }
    }

    pub fn children(&self) -> &[TreeNode] {
        match self {
            TreeNode::Terminal(_) => &[],
            TreeNode::NonTerminal { children, .. } => children,
        }
    }

    /// Fencepost span `(left, right)` of this node's yield.
    pub fn fenceposts(&self) -> (usize, usize) {
        match self {
            TreeNode::Terminal(i) => (*i, *i + 1),
            TreeNode::NonTerminal { children, .. } => {
                let left = children.first().map(|c| c.fenceposts().0).unwrap_or(0);
                let right = children.last().map(|c| c.fenceposts().1).unwrap_or(0);
                (left, right)
            }
        }
    }

    pub fn first_terminal(&self) -> usize {
        self.fenceposts().0
    }

    pub fn count_nonterminals(&self) -> usize {
        match self {
            TreeNode::Terminal(_) => 0,
            TreeNode::NonTerminal { children, .. } => {
                1 + children.iter().map(TreeNode::count_nonterminals).sum::<usize>()
            }
        }
    }

    fn collect_terminals(&self, out: &mut Vec<usize>) {
        match self {
            TreeNode::Terminal(i) => out.push(*i),
            TreeNode::NonTerminal { children, .. } => {
                for c in children {
                    c.collect_terminals(out);
                }
            }
        }
    }

    fn collect_spans(&self, out: &mut Vec<Span>) -> (usize, usize) {
        match self {
            TreeNode::Terminal(i) => (*i, *i + 1),
            TreeNode::NonTerminal { label, children } => {
                let mut left = usize::MAX;
                let mut right = 0;
                for c in children {
                    let (l, r) = c.collect_spans(out);
                    left = left.min(l);
                    right = right.max(r);
                }
                out.push(Span { left, right, label: label.clone() });
                (left, right)
            }
        }
    }
}

/// A labeled constituent: fenceposts are 0-based, token `i` (0-based) lies in `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub left: usize,
    pub right: usize,
    pub label: String,
}

impl Span {
    pub fn new(left: usize, right: usize, label: impl Into<String>) -> Span {
        Span { left, right, label: label.into() }
    }

    pub fn len(&self) -> usize {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.right == self.left
    }
}

/// A rooted ordered tree over a sentence.
///
/// `normalized` records that unary chains have been collapsed. It is
/// bookkeeping only and does not take part in equality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstituentTree {
    pub root: TreeNode,
    pub sentence: Sentence,
    pub normalized: bool,
}

impl PartialEq for ConstituentTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.sentence == other.sentence
    }
}

impl Eq for ConstituentTree {}

impl ConstituentTree {
    /// Builds a tree and checks its invariants.
    pub fn new(root: TreeNode, sentence: Sentence) -> Result<Self, TreebankError> {
        let tree = ConstituentTree { root, sentence, normalized: false };
        tree.validate()?;
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.sentence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentence.is_empty()
    }

    /// Checks the structural invariants: a non-terminal root, non-empty
    /// non-terminals, terminals `0..n` in order and a consistent POS layer.
    pub fn validate(&self) -> Result<(), TreebankError> {
        if self.root.is_terminal() {
            return Err(TreebankError::Invalid("root must be a non-terminal".into()));
        }
        if self.sentence.is_empty() {
            return Err(TreebankError::Invalid("sentence is empty".into()));
        }
        if let Some(tags) = &self.sentence.pos_tags {
            if tags.len() != self.sentence.len() {
                return Err(TreebankError::Invalid(format!(
                    "{} POS tags for {} tokens",
                    tags.len(),
                    self.sentence.len()
                )));
            }
        }
        fn check_nonempty(node: &TreeNode) -> Result<(), TreebankError> {
            if let TreeNode::NonTerminal { label, children } = node {
                if children.is_empty() {
                    return Err(TreebankError::Invalid(format!("non-terminal {label} has no children")));
                }
                for c in children {
                    check_nonempty(c)?;
                }
            }
            Ok(())
        }
        check_nonempty(&self.root)?;
        if self.normalized && self.has_unary_chain() {
            return Err(TreebankError::Invalid("tree is marked normalized but has a unary chain".into()));
        }
        let terminals = self.terminals();
        if terminals.len() != self.sentence.len() || terminals.iter().enumerate().any(|(k, &i)| k != i) {
            return Err(TreebankError::Invalid(format!(
                "terminal order {:?} does not match {} tokens",
                terminals,
                self.sentence.len()
            )));
        }
        Ok(())
    }

    pub fn terminals(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.sentence.len());
        self.root.collect_terminals(&mut out);
        out
    }

    /// One span per non-terminal, in post-order. Duplicates are kept.
    pub fn spans(&self) -> Vec<Span> {
        let mut out = Vec::new();
        self.root.collect_spans(&mut out);
        out
    }

    pub fn count_nonterminals(&self) -> usize {
        self.root.count_nonterminals()
    }

    /// True when some non-terminal has exactly one child and that child is a non-terminal.
    pub fn has_unary_chain(&self) -> bool {
        fn walk(node: &TreeNode) -> bool {
            match node {
                TreeNode::Terminal(_) => false,
                TreeNode::NonTerminal { children, .. } => {
                    (children.len() == 1 && !children[0].is_terminal()) || children.iter().any(walk)
                }
            }
        }
        walk(&self.root)
    }

    /// All non-terminal labels in pre-order.
    pub fn labels(&self) -> Vec<&str> {
        fn walk<'a>(node: &'a TreeNode, out: &mut Vec<&'a str>) {
            if let TreeNode::NonTerminal { label, children } = node {
                out.push(label);
                for c in children {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

impl fmt::Display for ConstituentTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_example() -> ConstituentTree {
        parse_bracketed("(S (NP the dog) (VP barks))").unwrap()
    }

    #[test]
    fn spans_of_running_example() {
        let mut spans = running_example().spans();
        spans.sort();
        let mut expected = vec![Span::new(0, 2, "NP"), Span::new(2, 3, "VP"), Span::new(0, 3, "S")];
        expected.sort();
        assert_eq!(spans, expected);
    }

    #[test]
    fn single_token_spans() {
        let t = parse_bracketed("(X a)").unwrap();
        assert_eq!(t.spans(), vec![Span::new(0, 1, "X")]);
    }

    #[test]
    fn duplicate_spans_are_kept() {
        let t = parse_bracketed("(A+A w1 w2)").unwrap();
        let expanded = expand_unary(&t, '+');
        let spans = expanded.spans();
        assert_eq!(spans, vec![Span::new(0, 2, "A"), Span::new(0, 2, "A")]);
        assert_eq!(spans.len(), expanded.count_nonterminals());
    }

    #[test]
    fn validate_rejects_misordered_terminals() {
        let root = TreeNode::node("S", vec![TreeNode::Terminal(1), TreeNode::Terminal(0)]);
        let err = ConstituentTree::new(root, Sentence::from_words(&["a", "b"])).unwrap_err();
        assert!(matches!(err, TreebankError::Invalid(_)));
    }

    #[test]
    fn validate_rejects_terminal_root() {
        let err = ConstituentTree::new(TreeNode::Terminal(0), Sentence::from_words(&["a"])).unwrap_err();
        assert!(matches!(err, TreebankError::Invalid(_)));
    }

    #[test]
    fn unary_chain_detection() {
        assert!(!running_example().has_unary_chain());
        assert!(parse_bracketed("(S (VP (VB run)))").unwrap().has_unary_chain());
    }
}
