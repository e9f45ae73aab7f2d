use super::{pos_window, window, DelayConfig};
use crate::attach_juxtapose::ParserState;
use crate::sl_codec::SlLabel;
use crate::treebank::Sentence;

/// Sparse binary features, one string per active feature.
pub type FeatureVector = Vec<String>;

/// Token-window templates shared by both decoders. Offsets are relative to
/// the current token, so `w+1` is the first lookahead token.
/// Returns the whole-window feature for use in conjunctions.
fn window_features(sentence: &Sentence, i: usize, cfg: &DelayConfig, out: &mut FeatureVector) -> String {
    let words: Vec<String> = window(sentence, i, cfg).iter().map(|w| w.to_lowercase()).collect();
    let off = |j: usize| j as isize - cfg.context as isize;
    for (j, w) in words.iter().enumerate() {
        out.push(format!("w{:+}={w}", off(j)));
    }
    for j in 0..words.len().saturating_sub(1) {
        out.push(format!("ww{:+}={}_{}", off(j), words[j], words[j + 1]));
    }
    let cur = &words[cfg.context];
    let suffix: String = cur.chars().rev().take(3).collect::<Vec<_>>().into_iter().rev().collect();
    out.push(format!("suf3={suffix}"));
    let win = words.join("_");
    out.push(format!("win={win}"));
    if let Some(tags) = pos_window(sentence, i, cfg) {
        for (j, t) in tags.iter().enumerate() {
            out.push(format!("p{:+}={t}", off(j)));
        }
        out.push(format!("pwin={}", tags.join("_")));
    }
    win
}

/// Features for labeling token `i` (0-based) given the labels already
/// predicted for `w_1..w_{i}`.
pub fn extract_sl_features(sentence: &Sentence, i: usize, cfg: &DelayConfig, history: &[SlLabel]) -> FeatureVector {
    let mut out = vec!["bias".to_string()];
    let win = window_features(sentence, i, cfg, &mut out);
    let h1 = i.checked_sub(1).and_then(|j| history.get(j)).map_or("<s>".to_string(), |l| l.to_string());
    let h2 = i.checked_sub(2).and_then(|j| history.get(j)).map_or("<s>".to_string(), |l| l.to_string());
    let w0 = sentence.tokens[i].to_lowercase();
    let wn = window(sentence, i, cfg).last().map(|w| w.to_lowercase()).unwrap_or_default();
    out.push(format!("h1={h1}"));
    out.push(format!("h1h2={h1}_{h2}"));
    out.push(format!("h1w0={h1}_{w0}"));
    out.push(format!("h1wn={h1}_{wn}"));
    out.push(format!("h1win={h1}_{win}"));
    out.push(format!("pos={}", i.min(4)));
    out
}

/// Features for the action reading token `state.next_token()`.
pub fn extract_tb_features(state: &ParserState, sentence: &Sentence, cfg: &DelayConfig) -> FeatureVector {
    let i = state.next_token();
    let mut out = vec!["bias".to_string()];
    let win = window_features(sentence, i, cfg, &mut out);
    if state.is_empty() {
        out.push("empty".to_string());
        return out;
    }
    let labels = state.chain_labels();
    let spans = state.chain_spans();
    let len = labels.len();
    out.push(format!("clen={}", len.min(8)));
    let bottom = |b: usize| (b < len).then(|| (labels[len - 1 - b], spans[len - 1 - b]));
    for b in 0..3 {
        match bottom(b) {
            Some((l, (lo, hi))) => {
                out.push(format!("c{b}={l}"));
                out.push(format!("c{b}wd={}", (hi - lo).min(6)));
            }
            None => out.push(format!("c{b}=<none>")),
        }
    }
    let w0 = sentence.tokens[i].to_lowercase();
    let wn = window(sentence, i, cfg).last().map(|w| w.to_lowercase()).unwrap_or_default();
    let tail: Vec<&str> = labels.iter().rev().take(4).copied().collect();
    let tail = tail.join("<");
    out.push(format!("chain={tail}"));
    out.push(format!("chainw0={tail}_{w0}"));
    out.push(format!("chainwn={tail}_{wn}"));
    let c0 = labels[len - 1];
    out.push(format!("c0w0={c0}_{w0}"));
    out.push(format!("c0wn={c0}_{wn}"));
    out.push(format!("chainwin={tail}_{win}"));
    out
}
