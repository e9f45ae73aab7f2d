use std::collections::HashSet;

use super::{LevelPair, SlError, SlLabel, SlMode, SEP};
use crate::treebank::{ConstituentTree, Sentence, TreeNode, DEFAULT_JOIN};

/// Placeholder label of still-open nodes in a partially decoded tree.
pub const PENDING_LABEL: &str = "<pending>";

/// Per-token ancestor paths, excluding a node that covers only that token.
struct Paths<'a> {
    /// `(node id, label)` from the root down.
    paths: Vec<Vec<(usize, &'a str)>>,
    leaves: Vec<Option<&'a str>>,
}

fn paths(tree: &ConstituentTree) -> Paths<'_> {
    fn walk<'a>(
        node: &'a TreeNode,
        stack: &mut Vec<(usize, &'a str)>,
        next_id: &mut usize,
        out: &mut Paths<'a>,
    ) {
        if let TreeNode::NonTerminal { label, children } = node {
            let id = *next_id;
            *next_id += 1;
            if let [TreeNode::Terminal(i)] = children.as_slice() {
                out.paths[*i] = stack.clone();
                out.leaves[*i] = Some(label);
                return;
            }
            stack.push((id, label));
            for c in children {
                match c {
                    TreeNode::Terminal(i) => out.paths[*i] = stack.clone(),
                    _ => walk(c, stack, next_id, out),
                }
            }
            stack.pop();
        }
    }
    let n = tree.len();
    let mut out = Paths { paths: vec![Vec::new(); n], leaves: vec![None; n] };
    walk(&tree.root, &mut Vec::new(), &mut 0, &mut out);
    out
}

fn pair_levels<'a>(paths: &Paths<'a>, i: usize) -> (usize, &'a str) {
    let (a, b) = (&paths.paths[i], &paths.paths[i + 1]);
    let shared = a.iter().zip(b).take_while(|(x, y)| x.0 == y.0).count();
    (shared, a[shared - 1].1)
}

/// Number of ancestors shared by tokens `i` and `i + 1` (0-based) and the
/// label of their lowest common ancestor.
pub fn common_levels(tree: &ConstituentTree, i: usize) -> Result<(usize, String), SlError> {
    if i + 1 >= tree.len() {
        return Err(SlError::IndexOutOfRange { index: i, len: tree.len() });
    }
    let p = paths(tree);
    let (l, c) = pair_levels(&p, i);
    Ok((l, c.to_string()))
}

/// Linearizes a normalized tree into exactly `n` labels.
pub fn encode(tree: &ConstituentTree, mode: SlMode) -> Result<Vec<SlLabel>, SlError> {
    if tree.has_unary_chain() {
        return Err(SlError::UnaryChain);
    }
    if let Some(l) = tree.labels().into_iter().find(|l| l.contains(SEP)) {
        return Err(SlError::ReservedCharacter(l.to_string()));
    }
    let n = tree.len();
    let p = paths(tree);
    let mut out = Vec::with_capacity(n);
    let mut prev = 0i64;
    for i in 0..n {
        let mut label = if i + 1 < n {
            let (l, c) = pair_levels(&p, i);
            let l = l as i64;
            let d = match mode {
                SlMode::Absolute => l,
                SlMode::Relative => l - prev,
            };
            prev = l;
            SlLabel::levels(d, c)
        } else {
            SlLabel::final_label()
        };
        label.leaf = p.leaves[i].map(str::to_string);
        out.push(label);
    }
    Ok(out)
}

/// Prefix sums of relative depths. Fails on the first sum below 1.
pub fn rel_to_abs(labels: &[SlLabel]) -> Result<Vec<SlLabel>, SlError> {
    let mut sum = 0i64;
    labels
        .iter()
        .enumerate()
        .map(|(index, label)| match &label.pair {
            Some(p) => {
                sum += p.d;
                if sum < 1 {
                    return Err(SlError::NonPositiveDepth { index, depth: sum });
                }
                Ok(SlLabel { pair: Some(LevelPair { d: sum, common: p.common.clone() }), leaf: label.leaf.clone() })
            }
            None => Ok(label.clone()),
        })
        .collect()
}

pub fn abs_to_rel(labels: &[SlLabel]) -> Vec<SlLabel> {
    let mut prev = 0i64;
    labels
        .iter()
        .map(|label| match &label.pair {
            Some(p) => {
                let d = p.d - prev;
                prev = p.d;
                SlLabel { pair: Some(LevelPair { d, common: p.common.clone() }), leaf: label.leaf.clone() }
            }
            None => label.clone(),
        })
        .collect()
}

/// Repair knobs for decoding predicted (possibly ill-formed) sequences.
#[derive(Debug, Clone)]
pub struct DecodeOptions {
    /// Root label when a sentence carries no constituent information.
    pub fallback_root: String,
    /// Label for nodes that never received one, and for unknown labels.
    pub default_label: String,
    /// When set, labels outside this inventory become `default_label`.
    pub known_labels: Option<HashSet<String>>,
    /// Used to merge two labeled nodes that ill-formed input left as a unary chain.
    pub join: char,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            fallback_root: "X".to_string(),
            default_label: "X".to_string(),
            known_labels: None,
            join: DEFAULT_JOIN,
        }
    }
}

impl DecodeOptions {
    fn admit(&self, label: &str) -> String {
        match &self.known_labels {
            Some(known) if !known.contains(label) => self.default_label.clone(),
            _ => label.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Child {
    Term(usize),
    Node(usize),
}

#[derive(Debug, Default)]
struct Builder {
    labels: Vec<Option<String>>,
    children: Vec<Vec<Child>>,
    spine: Vec<usize>,
    root: Option<usize>,
}

impl Builder {
    fn new_node(&mut self, label: Option<String>) -> usize {
        self.labels.push(label);
        self.children.push(Vec::new());
        self.labels.len() - 1
    }

    fn grow_spine(&mut self, depth: usize) {
        while self.spine.len() < depth {
            let id = self.new_node(None);
            match self.spine.last() {
                Some(&parent) => self.children[parent].push(Child::Node(id)),
                None => self.root = Some(id),
            }
            self.spine.push(id);
        }
    }

    /// Places token `i`. `target` is the absolute depth shared with the right
    /// neighbour (0 for the last token) and `common` names the node at that depth.
    fn push_token(&mut self, i: usize, target: usize, common: Option<String>, leaf: Option<String>) {
        let depth = self.spine.len().max(target);
        self.grow_spine(depth);
        if let (true, Some(c)) = (target > 0, common) {
            let slot = &mut self.labels[self.spine[target - 1]];
            if slot.is_none() {
                *slot = Some(c);
            }
        }
        let child = match leaf {
            Some(label) => {
                let id = self.new_node(Some(label));
                self.children[id].push(Child::Term(i));
                Child::Node(id)
            }
            None => Child::Term(i),
        };
        match self.spine.last() {
            Some(&parent) => self.children[parent].push(child),
            None => match child {
                Child::Node(id) if self.root.is_none() => self.root = Some(id),
                _ => {
                    // a token with nowhere to go: hang it under a fresh root
                    let id = self.new_node(None);
                    self.children[id].push(child);
                    if let Some(old) = self.root.replace(id) {
                        self.children[id].insert(0, Child::Node(old));
                    }
                }
            },
        }
        self.spine.truncate(target);
    }

    /// Converts to a tree. Nodes listed in `open` keep a pending label; all
    /// other unlabeled nodes are repaired.
    fn finish(&self, opts: &DecodeOptions, open: &[usize], root_fallback: bool) -> TreeNode {
        let root = self.root.expect("at least one token was placed");
        let fallback = if root_fallback { &opts.fallback_root } else { &opts.default_label };
        self.build(root, opts, open, fallback)
    }

    fn build(&self, id: usize, opts: &DecodeOptions, open: &[usize], fallback: &str) -> TreeNode {
        let is_open = open.contains(&id);
        let mut label = match (&self.labels[id], is_open) {
            (Some(l), _) => Some(l.clone()),
            (None, true) => Some(PENDING_LABEL.to_string()),
            (None, false) => None,
        };
        let mut kids = &self.children[id];
        // collapse closed single-child chains left behind by ill-formed input
        let mut current = id;
        while !open.contains(&current) {
            let [Child::Node(only)] = kids.as_slice() else { break };
            if open.contains(only) {
                break;
            }
            label = match (label, &self.labels[*only]) {
                (None, l) => l.clone(),
                (Some(outer), Some(inner)) => Some(format!("{outer}{}{inner}", opts.join)),
                (Some(outer), None) => Some(outer),
            };
            current = *only;
            kids = &self.children[current];
        }
        let children = kids
            .iter()
            .map(|c| match c {
                Child::Term(i) => TreeNode::Terminal(*i),
                Child::Node(n) => self.build(*n, opts, open, &opts.default_label),
            })
            .collect();
        TreeNode::node(label.unwrap_or_else(|| fallback.to_string()), children)
    }
}

fn absolute_levels(labels: &[SlLabel], mode: SlMode) -> Vec<Option<i64>> {
    let mut running = 0i64;
    labels
        .iter()
        .map(|label| {
            label.d().map(|d| {
                running = match mode {
                    SlMode::Absolute => d,
                    SlMode::Relative => running + d,
                }
                .max(1);
                running
            })
        })
        .collect()
}

/// Decodes a full label sequence with default repair options.
pub fn decode(labels: &[SlLabel], sentence: &Sentence, mode: SlMode) -> Result<ConstituentTree, SlError> {
    decode_with(labels, sentence, mode, &DecodeOptions::default())
}

/// Decodes a full label sequence, repairing ill-formed input: depths are
/// clamped to at least 1, the last label is read as end-of-sentence,
/// unlabeled nodes get `default_label` and closed single-child chains are merged.
pub fn decode_with(
    labels: &[SlLabel],
    sentence: &Sentence,
    mode: SlMode,
    opts: &DecodeOptions,
) -> Result<ConstituentTree, SlError> {
    let n = sentence.len();
    if n == 0 || labels.is_empty() {
        return Err(SlError::EmptyInput);
    }
    if labels.len() != n {
        return Err(SlError::LengthMismatch { labels: labels.len(), tokens: n });
    }
    let levels = absolute_levels(labels, mode);
    let mut b = Builder::default();
    for i in 0..n {
        let (target, common) = if i + 1 < n {
            match (levels[i], &labels[i].pair) {
                (Some(l), Some(p)) => (l as usize, Some(opts.admit(&p.common))),
                // end-of-sentence label too early: stay at the current depth
                _ => (b.spine.len().max(1), None),
            }
        } else {
            (0, None)
        };
        let leaf = labels[i].leaf.as_deref().map(|l| opts.admit(l));
        b.push_token(i, target, common, leaf);
    }
    let root = b.finish(opts, &[], true);
    let tree = ConstituentTree { root, sentence: sentence.clone(), normalized: true };
    debug_assert!(tree.validate().is_ok(), "decoder produced an invalid tree");
    Ok(tree)
}

/// A partially decoded tree over the first `m` tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDecode {
    pub tree: ConstituentTree,
    /// Number of nodes, from the root down the rightmost spine, that are still
    /// open (they will also cover token `m + 1`).
    pub open_levels: usize,
}

/// Decodes the first `m` labels of a sentence (none of them end-of-sentence)
/// into a partial tree over `w_1..w_m`. The open spine is kept as is; nodes
/// whose label is not known yet carry [`PENDING_LABEL`].
pub fn decode_prefix(labels: &[SlLabel], sentence: &Sentence, mode: SlMode) -> Result<PartialDecode, SlError> {
    let m = labels.len();
    if m == 0 || sentence.is_empty() {
        return Err(SlError::EmptyInput);
    }
    if m > sentence.len() {
        return Err(SlError::LengthMismatch { labels: m, tokens: sentence.len() });
    }
    if let Some(pos) = labels.iter().position(SlLabel::is_final) {
        return Err(SlError::FinalInPrefix(pos));
    }
    let opts = DecodeOptions::default();
    let levels = absolute_levels(labels, mode);
    let mut b = Builder::default();
    for (i, label) in labels.iter().enumerate() {
        let l = levels[i].expect("non-final labels carry depths") as usize;
        let c = label.pair.as_ref().map(|p| p.common.clone());
        b.push_token(i, l, c, label.leaf.clone());
    }
    let open = b.spine.clone();
    let root = b.finish(&opts, &open, false);
    Ok(PartialDecode {
        // open nodes may still have a single child, so this is not a normalized tree
        tree: ConstituentTree { root, sentence: sentence.prefix(m), normalized: false },
        open_levels: open.len(),
    })
}
