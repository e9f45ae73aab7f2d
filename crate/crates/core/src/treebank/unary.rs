use super::{ConstituentTree, TreeNode, TreebankError};

pub const DEFAULT_JOIN: char = '+';

/// Collapses every maximal chain of non-terminals with a single non-terminal
/// child into one node labeled `A+B+...+Z`.
///
/// A node whose only child is a terminal is not part of a chain. Trees
/// already marked normalized are returned unchanged.
pub fn collapse_unary(tree: &ConstituentTree, join: char) -> Result<ConstituentTree, TreebankError> {
    if tree.normalized {
        return Ok(tree.clone());
    }
    if let Some(label) = tree.labels().into_iter().find(|l| l.contains(join)) {
        return Err(TreebankError::JoinCharacterCollision { label: label.to_string(), join });
    }
    Ok(ConstituentTree {
        root: collapse_node(&tree.root, join),
        sentence: tree.sentence.clone(),
        normalized: true,
    })
}

fn collapse_node(node: &TreeNode, join: char) -> TreeNode {
    match node {
        TreeNode::Terminal(i) => TreeNode::Terminal(*i),
        TreeNode::NonTerminal { label, children } => {
            let mut label = label.clone();
            let mut children = children;
            while let [TreeNode::NonTerminal { label: inner, children: grand }] = children.as_slice() {
                label.push(join);
                label.push_str(inner);
                children = grand;
            }
            TreeNode::NonTerminal {
                label,
                children: children.iter().map(|c| collapse_node(c, join)).collect(),
            }
        }
    }
}

/// Inverse of [`collapse_unary`]: splits joined labels back into chains.
pub fn expand_unary(tree: &ConstituentTree, join: char) -> ConstituentTree {
    ConstituentTree {
        root: expand_node(&tree.root, join),
        sentence: tree.sentence.clone(),
        normalized: false,
    }
}

fn expand_node(node: &TreeNode, join: char) -> TreeNode {
    match node {
        TreeNode::Terminal(i) => TreeNode::Terminal(*i),
        TreeNode::NonTerminal { label, children } => {
            let children: Vec<TreeNode> = children.iter().map(|c| expand_node(c, join)).collect();
            let mut parts = label.split(join).filter(|p| !p.is_empty()).collect::<Vec<_>>();
            if parts.is_empty() {
                parts.push(label);
            }
            let mut node = TreeNode::node(parts.pop().unwrap(), children);
            while let Some(outer) = parts.pop() {
                node = TreeNode::node(outer, vec![node]);
            }
            node
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{parse_bracketed, serialize};

    fn collapse(s: &str) -> String {
        serialize(&collapse_unary(&parse_bracketed(s).unwrap(), '+').unwrap())
    }

    #[test]
    fn collapses_leaf_chain() {
        assert_eq!(collapse("(S (VP (VB run)))"), "(S+VP+VB run)");
    }

    #[test]
    fn collapses_root_chain() {
        assert_eq!(collapse("(TOP (S (NP a) (VP b)))"), "(TOP+S (NP a) (VP b))");
    }

    #[test]
    fn identity_without_chains() {
        assert_eq!(collapse("(S (NP the dog) (VP barks))"), "(S (NP the dog) (VP barks))");
    }

    #[test]
    fn expands_joined_labels() {
        let t = parse_bracketed("(S+VP+VB run)").unwrap();
        assert_eq!(serialize(&expand_unary(&t, '+')), "(S (VP (VB run)))");
        let plain = parse_bracketed("(S (NP a) b)").unwrap();
        assert_eq!(expand_unary(&plain, '+'), plain);
    }

    #[test]
    fn collision_is_reported() {
        let t = parse_bracketed("(S (A+B a) b)").unwrap();
        assert_eq!(
            collapse_unary(&t, '+'),
            Err(TreebankError::JoinCharacterCollision { label: "A+B".into(), join: '+' })
        );
        assert!(collapse_unary(&t, '|').is_ok());
    }

    #[test]
    fn collapsed_tree_has_no_unary_chain() {
        let t = parse_bracketed("(A (B (C (D a) (E (F b)))))").unwrap();
        let c = collapse_unary(&t, '+').unwrap();
        assert!(!c.has_unary_chain());
        assert!(c.normalized);
        assert_eq!(serialize(&c), "(A+B+C (D a) (E+F b))");
        assert_eq!(expand_unary(&c, '+'), t);
    }
}
