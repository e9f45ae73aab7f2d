use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use super::{EvalError, EvalParams};
use crate::treebank::{expand_unary, ConstituentTree};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LabelScore {
    pub matched: usize,
    pub gold: usize,
    pub pred: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl LabelScore {
    fn from_counts(matched: usize, gold: usize, pred: usize) -> LabelScore {
        let (precision, recall, f1) = prf(matched, gold, pred);
        LabelScore { matched, gold, pred, precision, recall, f1 }
    }
}

/// Precision, recall and F1 with 0/0 read as 0.
fn prf(matched: usize, gold: usize, pred: usize) -> (f64, f64, f64) {
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = ratio(matched, pred);
    let r = ratio(matched, gold);
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Corpus-level bracketing scores.
///
/// JSON schema: `{sentences, matched, gold_total, pred_total, precision,
/// recall, f1, exact_match, strip_functional, per_label: {LABEL: {matched,
/// gold, pred, precision, recall, f1}}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub sentences: usize,
    pub matched: usize,
    pub gold_total: usize,
    pub pred_total: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub exact_match: usize,
    pub strip_functional: bool,
    pub per_label: BTreeMap<String, LabelScore>,
}

impl EvalReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentences      {}", self.sentences);
        let _ = writeln!(out, "gold brackets  {}", self.gold_total);
        let _ = writeln!(out, "pred brackets  {}", self.pred_total);
        let _ = writeln!(out, "matched        {}", self.matched);
        let _ = writeln!(out, "precision      {:.2}", 100.0 * self.precision);
        let _ = writeln!(out, "recall         {:.2}", 100.0 * self.recall);
        let _ = writeln!(out, "F1             {:.2}", 100.0 * self.f1);
        let _ = writeln!(out, "exact match    {}", self.exact_match);
        let _ = writeln!(out, "strip functional tags: {}", self.strip_functional);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<12} {:>7} {:>7} {:>7} {:>7}", "label", "gold", "pred", "match", "F1");
        let mut rows: Vec<_> = self.per_label.iter().collect();
        rows.sort_by(|a, b| b.1.gold.cmp(&a.1.gold).then_with(|| a.0.cmp(b.0)));
        for (label, s) in rows {
            let _ = writeln!(out, "{:<12} {:>7} {:>7} {:>7} {:>7.2}", label, s.gold, s.pred, s.matched, 100.0 * s.f1);
        }
        out
    }
}

type SpanKey = (usize, usize, String);

fn scored_spans(tree: &ConstituentTree, params: &EvalParams) -> HashMap<SpanKey, usize> {
    let expanded = expand_unary(tree, params.join);
    let mut counts = HashMap::new();
    for span in expanded.spans() {
        if params.is_deleted(&span.label) {
            continue;
        }
        let label = params.normalize(&span.label).to_string();
        *counts.entry((span.left, span.right, label)).or_insert(0) += 1;
    }
    counts
}

fn check_lengths(gold: &[ConstituentTree], pred: &[ConstituentTree]) -> Result<(), EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::LengthMismatch { index: gold.len().min(pred.len()), gold: gold.len(), pred: pred.len() });
    }
    for (index, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::TokenMismatch { index, gold: g.len(), pred: p.len() });
        }
    }
    Ok(())
}

/// Labeled bracketing precision/recall/F1. Trees are unary-expanded,
/// labels normalized and deleted labels dropped on both sides; spans are
/// matched as multisets per sentence.
pub fn score(gold: &[ConstituentTree], pred: &[ConstituentTree], params: &EvalParams) -> Result<EvalReport, EvalError> {
    check_lengths(gold, pred)?;
    let mut per: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    let (mut matched, mut gold_total, mut pred_total, mut exact) = (0, 0, 0, 0);
    for (g, p) in gold.iter().zip(pred) {
        let gs = scored_spans(g, params);
        let ps = scored_spans(p, params);
        let mut sentence_matched = 0;
        for (key, &gc) in &gs {
            let m = gc.min(ps.get(key).copied().unwrap_or(0));
            sentence_matched += m;
            let e = per.entry(key.2.clone()).or_default();
            e.0 += m;
            e.1 += gc;
        }
        for (key, &pc) in &ps {
            per.entry(key.2.clone()).or_default().2 += pc;
        }
        let gn: usize = gs.values().sum();
        let pn: usize = ps.values().sum();
        if sentence_matched == gn && sentence_matched == pn {
            exact += 1;
        }
        matched += sentence_matched;
        gold_total += gn;
        pred_total += pn;
    }
    let (precision, recall, f1) = prf(matched, gold_total, pred_total);
    Ok(EvalReport {
        sentences: gold.len(),
        matched,
        gold_total,
        pred_total,
        precision,
        recall,
        f1,
        exact_match: exact,
        strip_functional: params.strip_functional,
        per_label: per.into_iter().map(|(l, (m, g, p))| (l, LabelScore::from_counts(m, g, p))).collect(),
    })
}

/// Per-label scores ranked by gold frequency (ties by label).
pub fn per_constituent(
    gold: &[ConstituentTree],
    pred: &[ConstituentTree],
    params: &EvalParams,
) -> Result<Vec<(String, LabelScore)>, EvalError> {
    let report = score(gold, pred, params)?;
    let mut rows: Vec<_> = report.per_label.into_iter().collect();
    rows.sort_by(|a, b| b.1.gold.cmp(&a.1.gold).then_with(|| a.0.cmp(&b.0)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_bracketed;

    fn trees(lines: &[&str]) -> Vec<ConstituentTree> {
        lines.iter().map(|l| parse_bracketed(l).unwrap()).collect()
    }

    #[test]
    fn identity_scores_one() {
        let g = trees(&["(S (NP the dog) (VP barks))", "(X a b)"]);
        let r = score(&g, &g, &EvalParams::default()).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        assert_eq!(r.exact_match, 2);
    }

    #[test]
    fn worked_example() {
        let g = trees(&["(S (NP the dog) (VP barks))"]);
        let p = trees(&["(S (NP the dog) barks)"]);
        let r = score(&g, &p, &EvalParams::default()).unwrap();
        assert_eq!((r.matched, r.gold_total, r.pred_total), (2, 3, 2));
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 2.0 / 3.0);
        assert!((r.f1 - 0.8).abs() < 1e-12);
        assert_eq!(r.exact_match, 0);
    }

    #[test]
    fn empty_prediction_scores_zero() {
        let g = trees(&["(S a b)"]);
        let p = trees(&["(TOP a b)"]);
        let params = EvalParams { delete_labels: ["TOP".to_string()].into(), ..Default::default() };
        let r = score(&g, &p, &params).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn length_checks() {
        let g = trees(&["(S a b)", "(S a)"]);
        let p = trees(&["(S a b)"]);
        assert!(matches!(score(&g, &p, &EvalParams::default()), Err(EvalError::LengthMismatch { index: 1, .. })));
        let p = trees(&["(S a b)", "(S a b)"]);
        assert_eq!(
            score(&g, &p, &EvalParams::default()),
            Err(EvalError::TokenMismatch { index: 1, gold: 1, pred: 2 })
        );
    }

    #[test]
    fn collapsed_labels_never_leak() {
        let g = trees(&["(S (VP (V a) b))"]);
        let p = trees(&["(S+VP (V a) b)"]);
        let r = score(&g, &p, &EvalParams::default()).unwrap();
        assert_eq!(r.f1, 1.0);
        assert!(r.per_label.keys().all(|l| !l.contains('+')));
    }

    #[test]
    fn functional_tags_are_stripped_by_default() {
        let g = trees(&["(S (NP-SBJ a) (VP b))"]);
        let p = trees(&["(S (NP a) (VP b))"]);
        assert_eq!(score(&g, &p, &EvalParams::default()).unwrap().f1, 1.0);
        let strict = EvalParams { strip_functional: false, ..Default::default() };
        assert!(score(&g, &p, &strict).unwrap().f1 < 1.0);
    }

    #[test]
    fn per_constituent_breakdown() {
        let g = trees(&["(S (NP the dog) (VP barks))", "(S (NP a) (VP b (NP c)))"]);
        let p = trees(&["(S (NP the dog) barks)", "(S (NP a) b (NP c))"]);
        let rows = per_constituent(&g, &p, &EvalParams::default()).unwrap();
        let labels: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
        assert_eq!(labels, ["NP", "S", "VP"]);
        assert_eq!(rows[0].1.f1, 1.0);
        assert_eq!(rows[1].1.f1, 1.0);
        assert_eq!(rows[2].1.f1, 0.0);
        let same = per_constituent(&g, &g, &EvalParams::default()).unwrap();
        assert!(same.iter().all(|(_, s)| s.f1 == 1.0));
        assert!(!same.iter().any(|(l, _)| l == "PP"));
    }
}
