//! The scorer against a deliberately naive reimplementation.

mod common;

use std::collections::BTreeMap;

use common::{naive_spans, perturb, tree_from_seed};
use incparse::evaluation::{score, EvalParams};
use incparse::synth::rng;
use incparse::ConstituentTree;
use proptest::prelude::*;

#[derive(Debug, PartialEq, Default)]
struct Counts {
    matched: usize,
    gold: usize,
    pred: usize,
    per_label: BTreeMap<String, (usize, usize, usize)>,
    exact: usize,
}

/// Matching by linear search and removal from a list; labels mapped through a
/// small lookup table, deleted labels dropped.
fn brute(gold: &[ConstituentTree], pred: &[ConstituentTree], eq: &[(&str, &str)], deleted: &[&str]) -> Counts {
    let canon = |l: &str| eq.iter().find(|(a, _)| *a == l).map_or(l.to_string(), |(_, b)| b.to_string());
    let spans = |t: &ConstituentTree| {
        let mut v = Vec::new();
        naive_spans(&t.root, 0, &mut v);
        v.into_iter()
            .filter(|s| !deleted.contains(&s.2.as_str()))
            .map(|(l, r, lab)| (l, r, canon(&lab)))
            .collect::<Vec<_>>()
    };
    let mut c = Counts::default();
    for (g, p) in gold.iter().zip(pred) {
        let gs = spans(g);
        let mut ps = spans(p);
        for s in &ps {
            c.per_label.entry(s.2.clone()).or_default().2 += 1;
        }
        let (gn, pn) = (gs.len(), ps.len());
        let mut m = 0;
        for s in gs {
            let e = c.per_label.entry(s.2.clone()).or_default();
            e.1 += 1;
            if let Some(pos) = ps.iter().position(|x| *x == s) {
                ps.remove(pos);
                e.0 += 1;
                m += 1;
            }
        }
        c.exact += usize::from(m == gn && m == pn);
        c.matched += m;
        c.gold += gn;
        c.pred += pn;
    }
    c
}

fn report_counts(gold: &[ConstituentTree], pred: &[ConstituentTree], params: &EvalParams) -> Counts {
    let r = score(gold, pred, params).unwrap();
    Counts {
        matched: r.matched,
        gold: r.gold_total,
        pred: r.pred_total,
        per_label: r.per_label.iter().map(|(l, s)| (l.clone(), (s.matched, s.gold, s.pred))).collect(),
        exact: r.exact_match,
    }
}

fn pair(seed: u64) -> (ConstituentTree, ConstituentTree) {
    let g = tree_from_seed(seed);
    let p = perturb(&mut rng(seed ^ 0x5eed), &g, &["S", "NP", "VP", "PP", "ADJP", "SBAR"]);
    (g, p)
}

proptest! {
    #[test]
    fn matches_brute_force(seeds in prop::collection::vec(any::<u64>(), 1..8)) {
        let (g, p): (Vec<_>, Vec<_>) = seeds.iter().map(|&s| pair(s)).unzip();
        prop_assert_eq!(report_counts(&g, &p, &EvalParams::default()), brute(&g, &p, &[], &[]));
    }

    #[test]
    fn matches_brute_force_with_params(seeds in prop::collection::vec(any::<u64>(), 1..8)) {
        let (g, p): (Vec<_>, Vec<_>) = seeds.iter().map(|&s| pair(s)).unzip();
        let mut params = EvalParams { delete_labels: ["PP".to_string()].into(), ..Default::default() };
        params.add_equivalence("ADJP", "VP");
        prop_assert_eq!(report_counts(&g, &p, &params), brute(&g, &p, &[("VP", "ADJP")], &["PP"]));
    }

    #[test]
    fn swapping_sides_swaps_precision_and_recall(seed in any::<u64>()) {
        let (g, p) = pair(seed);
        let a = score(std::slice::from_ref(&g), std::slice::from_ref(&p), &EvalParams::default()).unwrap();
        let b = score(&[p], &[g], &EvalParams::default()).unwrap();
        prop_assert_eq!(a.precision, b.recall);
        prop_assert_eq!(a.recall, b.precision);
        prop_assert!((a.f1 - b.f1).abs() < 1e-12);
    }

    #[test]
    fn flattening_never_adds_brackets(seed in any::<u64>()) {
        let (g, p) = pair(seed);
        let flat = perturb(&mut rng(seed ^ 1), &p, &["S"]);
        let a = score(std::slice::from_ref(&g), &[p], &EvalParams::default()).unwrap();
        let b = score(&[g], &[flat], &EvalParams::default()).unwrap();
        prop_assert!(b.pred_total <= a.pred_total);
    }
}
