#![allow(dead_code)]

use incparse::synth::{random_tree, rng, RandomTreeConfig};
use incparse::{ConstituentTree, TreeNode};
use rand::Rng;

pub fn tree_from_seed(seed: u64) -> ConstituentTree {
    random_tree(&mut rng(seed), &RandomTreeConfig::default())
}

pub fn tree_with_chains(seed: u64) -> ConstituentTree {
    let cfg = RandomTreeConfig { unary_chain_prob: 0.3, ..Default::default() };
    random_tree(&mut rng(seed), &cfg)
}

/// Spans as (left, right, label), read straight off the node structure.
pub fn naive_spans(node: &TreeNode, start: usize, out: &mut Vec<(usize, usize, String)>) -> usize {
    match node {
        TreeNode::Terminal(_) => start + 1,
        TreeNode::NonTerminal { label, children } => {
            let mut end = start;
            for c in children {
                end = naive_spans(c, end, out);
            }
            out.push((start, end, label.clone()));
            end
        }
    }
}

/// Relabels and flattens random nodes of `tree`.
pub fn perturb<R: Rng>(rng: &mut R, tree: &ConstituentTree, labels: &[&str]) -> ConstituentTree {
    fn go<R: Rng>(rng: &mut R, node: &TreeNode, labels: &[&str], is_root: bool) -> Vec<TreeNode> {
        match node {
            TreeNode::Terminal(i) => vec![TreeNode::Terminal(*i)],
            TreeNode::NonTerminal { label, children } => {
                let kids: Vec<TreeNode> = children.iter().flat_map(|c| go(rng, c, labels, false)).collect();
                if !is_root && rng.gen_bool(0.2) {
                    return kids;
                }
                let label = if rng.gen_bool(0.2) { labels[rng.gen_range(0..labels.len())].to_string() } else { label.clone() };
                vec![TreeNode::NonTerminal { label, children: kids }]
            }
        }
    }
    let root = go(rng, &tree.root, labels, true).pop().unwrap();
    let mut out = ConstituentTree::new(root, tree.sentence.clone()).unwrap();
    out.normalized = !out.has_unary_chain();
    out
}
