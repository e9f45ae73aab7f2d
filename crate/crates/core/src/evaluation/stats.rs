use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::EvalError;
use crate::treebank::{ConstituentTree, TreeNode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelStat {
    pub label: String,
    pub count: usize,
    /// Share of all reported spans, in percent.
    pub frequency: f64,
    /// Mean span length (right minus left fencepost).
    pub avg_length: f64,
}

/// Per-label frequency and average span length, most frequent first.
///
/// Spans covering the whole sentence and spans taking part in a unary chain
/// (a node with a single non-terminal child, or that child) are skipped.
pub fn corpus_stats(corpus: &[ConstituentTree]) -> Result<Vec<LabelStat>, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    fn walk(node: &TreeNode, n: usize, in_chain: bool, acc: &mut BTreeMap<String, (usize, usize)>) {
        let TreeNode::NonTerminal { label, children } = node else { return };
        let single_nt_child = matches!(children.as_slice(), [only] if !only.is_terminal());
        let (l, r) = node.fenceposts();
        if !(in_chain || single_nt_child || (l == 0 && r == n)) {
            let e = acc.entry(label.clone()).or_default();
            e.0 += 1;
            e.1 += r - l;
        }
        for c in children {
            walk(c, n, single_nt_child, acc);
        }
    }
    let mut acc = BTreeMap::new();
    for tree in corpus {
        walk(&tree.root, tree.len(), false, &mut acc);
    }
    let total: usize = acc.values().map(|(c, _)| c).sum();
    let mut out: Vec<LabelStat> = acc
        .into_iter()
        .map(|(label, (count, length))| LabelStat {
            label,
            count,
            frequency: 100.0 * count as f64 / total as f64,
            avg_length: length as f64 / count as f64,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    Ok(out)
}

/// Three-row table (labels, λ, %) with two decimals, optionally the `top` most frequent labels.
pub fn format_stats_table(stats: &[LabelStat], top: Option<usize>) -> String {
    let rows = &stats[..top.unwrap_or(stats.len()).min(stats.len())];
    let mut out = String::new();
    let _ = write!(out, "{:<8}", "label");
    for s in rows {
        let _ = write!(out, " {:>8}", s.label);
    }
    let _ = write!(out, "\n{:<8}", "lambda");
    for s in rows {
        let _ = write!(out, " {:>8.2}", s.avg_length);
    }
    let _ = write!(out, "\n{:<8}", "%");
    for s in rows {
        let _ = write!(out, " {:>8.2}", s.frequency);
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_bracketed;

    fn corpus(lines: &[&str]) -> Vec<ConstituentTree> {
        lines.iter().map(|l| parse_bracketed(l).unwrap()).collect()
    }

    #[test]
    fn one_tree() {
        let stats = corpus_stats(&corpus(&["(S (NP a b) (VP c))"])).unwrap();
        assert_eq!(stats.len(), 2);
        assert_eq!((stats[0].label.as_str(), stats[0].avg_length, stats[0].frequency), ("NP", 2.0, 50.0));
        assert_eq!((stats[1].label.as_str(), stats[1].avg_length, stats[1].frequency), ("VP", 1.0, 50.0));
    }

    #[test]
    fn root_only_corpus_is_empty() {
        assert!(corpus_stats(&corpus(&["(S a b)", "(X a)"])).unwrap().is_empty());
        assert_eq!(corpus_stats(&[]), Err(EvalError::EmptyCorpus));
    }

    #[test]
    fn unary_chain_members_are_skipped() {
        let stats = corpus_stats(&corpus(&["(TOP (S (NP a b) (VP (V c) (NP d e))))"])).unwrap();
        let labels: Vec<_> = stats.iter().map(|s| (s.label.as_str(), s.count)).collect();
        assert_eq!(labels, [("NP", 2), ("V", 1), ("VP", 1)]);
        let total: f64 = stats.iter().map(|s| s.frequency).sum();
        assert!((total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn table_format() {
        // reference row shape: English NP, lambda 4.96, 43.13 %
        let row = LabelStat { label: "NP".into(), count: 1, frequency: 43.13, avg_length: 4.96 };
        let table = format_stats_table(&[row], None);
        assert_eq!(table, "label          NP\nlambda       4.96\n%           43.13\n");
    }
}
