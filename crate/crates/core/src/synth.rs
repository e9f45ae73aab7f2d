//! Random and exhaustive tree generators plus a small ambiguous toy grammar.
//!
//! Everything here is seeded; the same seed always yields the same corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::treebank::{ConstituentTree, Sentence, TreeNode};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct RandomTreeConfig {
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub labels: Vec<String>,
    pub max_children: usize,
    /// Probability that a single-token child gets its own non-terminal.
    pub leaf_wrap_prob: f64,
    /// Probability that a non-terminal is wrapped in an extra unary parent.
    /// Zero yields trees that are already normalized.
    pub unary_chain_prob: f64,
}

impl Default for RandomTreeConfig {
    fn default() -> Self {
        RandomTreeConfig {
            min_tokens: 5,
            max_tokens: 40,
            labels: ["S", "NP", "VP", "PP", "ADJP", "SBAR"].iter().map(|s| s.to_string()).collect(),
            max_children: 4,
            leaf_wrap_prob: 0.3,
            unary_chain_prob: 0.0,
        }
    }
}

/// Generates a random tree with `min_tokens..=max_tokens` tokens named `w1, w2, ...`.
pub fn random_tree<R: Rng>(rng: &mut R, cfg: &RandomTreeConfig) -> ConstituentTree {
    let n = rng.gen_range(cfg.min_tokens.max(1)..=cfg.max_tokens.max(cfg.min_tokens.max(1)));
    let mut next = 0;
    let root = random_node(rng, cfg, n, &mut next);
    let sentence = Sentence::new((1..=n).map(|i| format!("w{i}")).collect());
    ConstituentTree { root, sentence, normalized: cfg.unary_chain_prob == 0.0 }
}

fn random_label<R: Rng>(rng: &mut R, cfg: &RandomTreeConfig) -> String {
    cfg.labels.choose(rng).cloned().unwrap_or_else(|| "X".to_string())
}

fn random_node<R: Rng>(rng: &mut R, cfg: &RandomTreeConfig, len: usize, next: &mut usize) -> TreeNode {
    let children = if len == 1 {
        *next += 1;
        vec![TreeNode::Terminal(*next - 1)]
    } else {
        let k = rng.gen_range(2..=cfg.max_children.max(2).min(len));
        // random composition of len into k positive parts
        let mut cuts: Vec<usize> = (1..len).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
        cuts.sort_unstable();
        let mut sizes = Vec::with_capacity(k);
        let mut prev = 0;
        for c in cuts.into_iter().chain(std::iter::once(len)) {
            sizes.push(c - prev);
            prev = c;
        }
        sizes
            .into_iter()
            .map(|size| {
                if size == 1 && !rng.gen_bool(cfg.leaf_wrap_prob) {
                    *next += 1;
                    TreeNode::Terminal(*next - 1)
                } else {
                    random_node(rng, cfg, size, next)
                }
            })
            .collect()
    };
    let mut node = TreeNode::node(random_label(rng, cfg), children);
    while cfg.unary_chain_prob > 0.0 && rng.gen_bool(cfg.unary_chain_prob) {
        node = TreeNode::node(random_label(rng, cfg), vec![node]);
    }
    node
}

/// Every normalized tree over `n` tokens whose internal nodes carry a label from
/// `labels` and whose single-token children are either bare or wrapped in a node
/// labeled from `wrap_labels`.
pub fn enumerate_trees(n: usize, labels: &[&str], wrap_labels: &[&str]) -> Vec<ConstituentTree> {
    let sentence = Sentence::new((1..=n).map(|i| format!("w{i}")).collect());
    enumerate_nodes(0, n, labels, wrap_labels)
        .into_iter()
        .map(|root| ConstituentTree { root, sentence: sentence.clone(), normalized: true })
        .collect()
}

fn enumerate_nodes(start: usize, len: usize, labels: &[&str], wrap: &[&str]) -> Vec<TreeNode> {
    if len == 1 {
        return labels.iter().map(|l| TreeNode::node(*l, vec![TreeNode::Terminal(start)])).collect();
    }
    let mut out = Vec::new();
    for parts in compositions(len) {
        let mut child_sets: Vec<Vec<TreeNode>> = Vec::with_capacity(parts.len());
        let mut pos = start;
        for &size in &parts {
            let set = if size == 1 {
                let mut v = vec![TreeNode::Terminal(pos)];
                v.extend(wrap.iter().map(|l| TreeNode::node(*l, vec![TreeNode::Terminal(pos)])));
                v
            } else {
                enumerate_nodes(pos, size, labels, wrap)
            };
            child_sets.push(set);
            pos += size;
        }
        for children in cartesian(&child_sets) {
            for l in labels {
                out.push(TreeNode::node(*l, children.clone()));
            }
        }
    }
    out
}

/// Compositions of `n` into at least two positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    // each of the n-1 gaps is either a cut or not; at least one cut
    for mask in 1u32..(1 << (n - 1)) {
        let mut parts = Vec::new();
        let mut size = 1;
        for gap in 0..n - 1 {
            if mask & (1 << gap) != 0 {
                parts.push(size);
                size = 1;
            } else {
                size += 1;
            }
        }
        parts.push(size);
        out.push(parts);
    }
    out
}

fn cartesian(sets: &[Vec<TreeNode>]) -> Vec<Vec<TreeNode>> {
    let mut acc: Vec<Vec<TreeNode>> = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::with_capacity(acc.len() * set.len());
        for prefix in &acc {
            for item in set {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cat {
    S,
    Np,
    Vp,
    Pp,
    Sbar,
    Adjp,
    Dt,
    N,
    Prp,
    Nnp,
    Jj,
    Rb,
    V,
    Md,
    P,
    C,
    Cc,
}

impl Cat {
    fn phrase_label(self) -> Option<&'static str> {
        match self {
            Cat::S => Some("S"),
            Cat::Np => Some("NP"),
            Cat::Vp => Some("VP"),
            Cat::Pp => Some("PP"),
            Cat::Sbar => Some("SBAR"),
            Cat::Adjp => Some("ADJP"),
            _ => None,
        }
    }

    fn words(self) -> &'static [&'static str] {
        // several forms are deliberately shared between categories
        match self {
            Cat::Dt => &["the", "a", "that", "this", "some"],
            Cat::N => &["dog", "cat", "man", "saw", "park", "telescope", "duck", "book", "time", "flies", "can", "run"],
            Cat::Prp => &["she", "he", "they", "it"],
            Cat::Nnp => &["Mary", "John", "Paris"],
            Cat::Jj => &["old", "big", "red", "fast", "little"],
            Cat::Rb => &["very", "quite", "fast"],
            Cat::V => &["saw", "run", "duck", "book", "flies", "sees", "likes", "walks", "barks", "said", "thinks", "like"],
            Cat::Md => &["will", "can", "may"],
            Cat::P => &["in", "with", "on", "near", "like"],
            Cat::C => &["that", "if"],
            Cat::Cc => &["and", "but"],
            _ => &[],
        }
    }
}

/// A small probabilistic phrase-structure grammar whose lexicon reuses word
/// forms across categories, so phrase boundaries are often decided only by the
/// next word. Preterminals are not emitted; tokens hang directly off phrases.
#[derive(Debug, Clone)]
pub struct ToyGrammar {
    pub max_depth: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
}

impl Default for ToyGrammar {
    fn default() -> Self {
        ToyGrammar { max_depth: 7, min_tokens: 3, max_tokens: 30 }
    }
}

enum Item {
    Phrase(TreeNode),
    Word,
}

impl ToyGrammar {
    /// Draws one sentence tree (retrying until its length is within bounds).
    pub fn generate<R: Rng>(&self, rng: &mut R) -> ConstituentTree {
        loop {
            let mut tokens = Vec::new();
            let root = match self.expand(rng, Cat::S, 0, &mut tokens) {
                Item::Phrase(node) => node,
                Item::Word => unreachable!("S is a phrase"),
            };
            if (self.min_tokens..=self.max_tokens).contains(&tokens.len()) {
                return ConstituentTree { root, sentence: Sentence::new(tokens), normalized: false };
            }
        }
    }

    pub fn corpus(&self, seed: u64, size: usize) -> Vec<ConstituentTree> {
        let mut rng = rng(seed);
        (0..size).map(|_| self.generate(&mut rng)).collect()
    }

    fn pick<'a, R: Rng>(rng: &mut R, options: &'a [(f64, &'a [Cat])]) -> &'a [Cat] {
        let total: f64 = options.iter().map(|(w, _)| w).sum();
        let mut x = rng.gen_range(0.0..total);
        for (w, rhs) in options {
            if x < *w {
                return rhs;
            }
            x -= w;
        }
        options.last().unwrap().1
    }

    fn rules(cat: Cat, deep: bool) -> Vec<(f64, &'static [Cat])> {
        use Cat::*;
        match (cat, deep) {
            (S, false) => vec![(0.82, &[Np, Vp]), (0.06, &[Vp]), (0.12, &[S, Cc, S])],
            (S, true) => vec![(1.0, &[Np, Vp])],
            (Np, false) => vec![
                (0.30, &[Dt, N]),
                (0.14, &[Dt, Adjp, N]),
                (0.14, &[Prp]),
                (0.16, &[Np, Pp]),
                (0.10, &[Dt, N, N]),
                (0.10, &[Nnp]),
                (0.06, &[Np, Cc, Np]),
            ],
            (Np, true) => vec![(0.5, &[Dt, N]), (0.25, &[Prp]), (0.25, &[Nnp])],
            (Vp, false) => vec![
                (0.30, &[V, Np]),
                (0.15, &[V]),
                (0.15, &[V, Np, Pp]),
                (0.10, &[V, Pp]),
                (0.12, &[V, Sbar]),
                (0.12, &[Md, Vp]),
                (0.06, &[V, Adjp]),
            ],
            (Vp, true) => vec![(0.5, &[V]), (0.5, &[V, Np])],
            (Pp, _) => vec![(1.0, &[P, Np])],
            (Sbar, _) => vec![(1.0, &[C, S])],
            (Adjp, _) => vec![(0.7, &[Jj]), (0.3, &[Rb, Jj])],
            _ => vec![],
        }
    }

    fn expand<R: Rng>(&self, rng: &mut R, cat: Cat, depth: usize, tokens: &mut Vec<String>) -> Item {
        let Some(label) = cat.phrase_label() else {
            let word = *cat.words().choose(rng).expect("lexical category");
            tokens.push(word.to_string());
            return Item::Word;
        };
        let rules = Self::rules(cat, depth >= self.max_depth);
        let rhs = Self::pick(rng, &rules);
        let mut children = Vec::with_capacity(rhs.len());
        for &child in rhs {
            match self.expand(rng, child, depth + 1, tokens) {
                Item::Phrase(node) => children.push(node),
                Item::Word => children.push(TreeNode::Terminal(tokens.len() - 1)),
            }
        }
        Item::Phrase(TreeNode::node(label, children))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees_are_valid_and_normalized() {
        let mut r = rng(7);
        let cfg = RandomTreeConfig::default();
        for _ in 0..200 {
            let t = random_tree(&mut r, &cfg);
            t.validate().unwrap();
            assert!(!t.has_unary_chain());
            assert!((5..=40).contains(&t.len()));
        }
    }

    #[test]
    fn unary_chains_appear_when_requested() {
        let mut r = rng(3);
        let cfg = RandomTreeConfig { unary_chain_prob: 0.3, ..Default::default() };
        let with_chain = (0..50).filter(|_| random_tree(&mut r, &cfg).has_unary_chain()).count();
        assert!(with_chain > 0);
    }

    #[test]
    fn compositions_count() {
        // 2^(n-1) - 1 compositions with at least two parts
        assert_eq!(compositions(4).len(), 7);
        assert_eq!(compositions(2), vec![vec![1, 1]]);
    }

    #[test]
    fn enumeration_counts_small_cases() {
        // n = 2: shapes X(a b) with each child bare or wrapped
        assert_eq!(enumerate_trees(1, &["A"], &[]).len(), 1);
        assert_eq!(enumerate_trees(2, &["A"], &["A"]).len(), 4);
        // n = 3, one label, no wraps: little Schroeder number 3
        assert_eq!(enumerate_trees(3, &["A"], &[]).len(), 3);
        for t in enumerate_trees(4, &["A", "B"], &["A"]) {
            t.validate().unwrap();
            assert!(!t.has_unary_chain());
        }
    }

    #[test]
    fn toy_grammar_is_seeded() {
        let g = ToyGrammar::default();
        let a = g.corpus(11, 20);
        let b = g.corpus(11, 20);
        assert_eq!(a, b);
        for t in &a {
            t.validate().unwrap();
        }
    }
}
