use rand::Rng;
use serde::Serialize;

use super::Parser;
use crate::synth::{self, ToyGrammar};
use crate::treebank::Sentence;

/// Anything that makes one decision per token.
pub trait IncrementalPredictor {
    fn decisions(&self, sentence: &Sentence) -> Vec<String>;
}

impl IncrementalPredictor for Parser {
    fn decisions(&self, sentence: &Sentence) -> Vec<String> {
        Parser::decisions(self, sentence).expect("parser decisions")
    }
}

/// Deliberately broken predictor: every decision looks at the last token.
#[derive(Debug, Clone, Copy, Default)]
pub struct PeekLastToken;

impl IncrementalPredictor for PeekLastToken {
    fn decisions(&self, sentence: &Sentence) -> Vec<String> {
        let last = sentence.tokens.last().cloned().unwrap_or_default();
        sentence.tokens.iter().map(|w| format!("{w}|{last}")).collect()
    }
}

/// Two sentences whose first `shared` tokens are identical and whose token
/// `shared + 1` (1-based) differs. Their last tokens differ as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub first: Sentence,
    pub second: Sentence,
    pub shared: usize,
}

/// Builds pairs from the toy grammar: a sentence, and its prefix of random
/// length continued with the tokens of another sentence.
pub fn generate_pairs(grammar: &ToyGrammar, seed: u64, count: usize) -> Vec<SentencePair> {
    let mut rng = synth::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = grammar.generate(&mut rng).sentence;
        let b = grammar.generate(&mut rng).sentence;
        if a.len() < 2 {
            continue;
        }
        let shared = rng.gen_range(1..a.len());
        let mut tokens = a.tokens[..shared].to_vec();
        tokens.extend(b.tokens.iter().cloned());
        if tokens[shared] == a.tokens[shared] || tokens.last() == a.tokens.last() {
            continue;
        }
        out.push(SentencePair { first: Sentence::new(a.tokens), second: Sentence::new(tokens), shared });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairAudit {
    pub shared: usize,
    /// 1-based index of the first differing decision, if any.
    pub first_divergence: Option<usize>,
    /// Smallest 1-based index at which a divergence is permitted.
    pub allowed_from: usize,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub k: usize,
    pub pairs: Vec<PairAudit>,
    pub violations: usize,
}

/// Checks that decisions at positions `1..=shared-k` agree within each pair.
pub fn audit_incrementality<P: IncrementalPredictor + ?Sized>(
    predictor: &P,
    pairs: &[SentencePair],
    k: usize,
) -> AuditReport {
    let audits: Vec<PairAudit> = pairs
        .iter()
        .map(|pair| {
            let a = predictor.decisions(&pair.first);
            let b = predictor.decisions(&pair.second);
            let first_divergence = a.iter().zip(&b).position(|(x, y)| x != y).map(|p| p + 1);
            let allowed_from = (pair.shared + 1).saturating_sub(k).max(1);
            let violation = first_divergence.is_some_and(|d| d < allowed_from);
            PairAudit { shared: pair.shared, first_divergence, allowed_from, violation }
        })
        .collect();
    let violations = audits.iter().filter(|a| a.violation).count();
    AuditReport { k, pairs: audits, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Decision i is token i plus the next `k` tokens; compliant by construction.
    struct Lookahead(usize);

    impl IncrementalPredictor for Lookahead {
        fn decisions(&self, s: &Sentence) -> Vec<String> {
            (0..s.len()).map(|i| s.tokens[i..(i + 1 + self.0).min(s.len())].join(" ")).collect()
        }
    }

    #[test]
    fn pairs_share_exactly_the_stated_prefix() {
        for p in generate_pairs(&ToyGrammar::default(), 3, 50) {
            assert_eq!(p.first.tokens[..p.shared], p.second.tokens[..p.shared]);
            assert_ne!(p.first.tokens[p.shared], p.second.tokens[p.shared]);
        }
    }

    #[test]
    fn compliant_predictors_pass() {
        let pairs = generate_pairs(&ToyGrammar::default(), 5, 100);
        for k in 0..3 {
            let report = audit_incrementality(&Lookahead(k), &pairs, k);
            assert_eq!(report.violations, 0);
            // a predictor using exactly k tokens of lookahead diverges as early as allowed
            assert!(report.pairs.iter().all(|a| a.first_divergence == Some(a.allowed_from)));
        }
        assert!(audit_incrementality(&Lookahead(2), &pairs, 1).violations > 0);
    }

    #[test]
    fn planted_fault_is_flagged_at_one() {
        let pairs = generate_pairs(&ToyGrammar::default(), 7, 100);
        let report = audit_incrementality(&PeekLastToken, &pairs, 2);
        assert!(report.pairs.iter().all(|a| a.first_divergence == Some(1)));
        assert_eq!(report.violations, report.pairs.iter().filter(|a| a.shared > 2).count());
    }

    #[test]
    fn window_shifts_with_delay() {
        let pairs = generate_pairs(&ToyGrammar::default(), 9, 20);
        let r0 = audit_incrementality(&PeekLastToken, &pairs, 0);
        let r2 = audit_incrementality(&PeekLastToken, &pairs, 2);
        for (a, b) in r0.pairs.iter().zip(&r2.pairs) {
            assert_eq!(a.allowed_from, a.shared + 1);
            assert_eq!(a.allowed_from - b.allowed_from, 2.min(a.shared));
        }
    }
}
