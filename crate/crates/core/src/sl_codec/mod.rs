//! Tree linearization as one label per token.
//!
//! Label `i` records how many ancestors tokens `i` and `i + 1` share and the
//! label of their lowest common ancestor. The depth is written either
//! directly (absolute mode) or as a difference from the previous label
//! (relative mode). The last token gets the end-of-sentence label.
//!
//! Nodes that cover a single token are never shared by two neighbours, so
//! each label also carries the optional label of the node directly above its
//! token when that node spans only the token (`leaf`). Without it a tree such
//! as `(S (NP the dog) (VP barks))` could not be recovered.

mod codec;
mod tsv;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use codec::{
    abs_to_rel, common_levels, decode, decode_prefix, decode_with, encode, rel_to_abs, DecodeOptions, PartialDecode,
    PENDING_LABEL,
};
pub use tsv::{format_sentence, LabelBlock, LabelFileReader};

const FINAL: &str = "FINAL";
const SEP: char = '@';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlError {
    #[error("token index {index} out of range for {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("tree contains a unary chain; collapse it first")]
    UnaryChain,
    #[error("label {0:?} contains the reserved separator '@'")]
    ReservedCharacter(String),
    #[error("empty input")]
    EmptyInput,
    #[error("{labels} labels for {tokens} tokens")]
    LengthMismatch { labels: usize, tokens: usize },
    #[error("prefix labels must not contain FINAL (position {0})")]
    FinalInPrefix(usize),
    #[error("non-positive depth {depth} at position {index}")]
    NonPositiveDepth { index: usize, depth: i64 },
    #[error("cannot parse label {0:?}")]
    BadLabel(String),
    #[error("line {line}: {message}")]
    BadFile { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlMode {
    Absolute,
    Relative,
}

impl fmt::Display for SlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlMode::Absolute => "absolute",
            SlMode::Relative => "relative",
        })
    }
}

impl FromStr for SlMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" | "abs" => Ok(SlMode::Absolute),
            "relative" | "rel" => Ok(SlMode::Relative),
            other => Err(format!("unknown mode {other:?} (expected absolute or relative)")),
        }
    }
}

/// Shared-depth value and lowest common ancestor label for one adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelPair {
    pub d: i64,
    pub common: String,
}

/// One per-token label. `pair` is `None` for the end-of-sentence label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlLabel {
    pub pair: Option<LevelPair>,
    pub leaf: Option<String>,
}

impl SlLabel {
    pub fn levels(d: i64, common: impl Into<String>) -> SlLabel {
        SlLabel { pair: Some(LevelPair { d, common: common.into() }), leaf: None }
    }

    pub fn final_label() -> SlLabel {
        SlLabel { pair: None, leaf: None }
    }

    pub fn with_leaf(mut self, leaf: impl Into<String>) -> SlLabel {
        self.leaf = Some(leaf.into());
        self
    }

    pub fn is_final(&self) -> bool {
        self.pair.is_none()
    }

    pub fn d(&self) -> Option<i64> {
        self.pair.as_ref().map(|p| p.d)
    }
}

impl fmt::Display for SlLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pair {
            Some(p) => write!(f, "{}{SEP}{}", p.d, p.common)?,
            None => f.write_str(FINAL)?,
        }
        if let Some(leaf) = &self.leaf {
            write!(f, "{SEP}{leaf}")?;
        }
        Ok(())
    }
}

impl FromStr for SlLabel {
    type Err = SlError;

    /// Accepts `d@c`, `d@c@leaf`, `FINAL` and `FINAL@leaf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SlError::BadLabel(s.to_string());
        let mut parts = s.split(SEP);
        let head = parts.next().ok_or_else(bad)?;
        let rest: Vec<&str> = parts.collect();
        if rest.iter().any(|p| p.is_empty()) {
            return Err(bad());
        }
        if head == FINAL {
            return match rest.as_slice() {
                [] => Ok(SlLabel::final_label()),
                [leaf] => Ok(SlLabel::final_label().with_leaf(*leaf)),
                _ => Err(bad()),
            };
        }
        let d: i64 = head.parse().map_err(|_| bad())?;
        match rest.as_slice() {
            [c] => Ok(SlLabel::levels(d, *c)),
            [c, leaf] => Ok(SlLabel::levels(d, *c).with_leaf(*leaf)),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_text_round_trip() {
        for text in ["2@NP", "-1@S", "FINAL", "FINAL@VP", "3@S+VP@ADJP", "0@X"] {
            let label: SlLabel = text.parse().unwrap();
            assert_eq!(label.to_string(), text);
        }
    }

    #[test]
    fn malformed_labels() {
        for text in ["", "NP", "2@", "2@NP@", "FINAL@", "x@NP", "2@A@B@C", "FINAL@A@B"] {
            assert!(text.parse::<SlLabel>().is_err(), "{text}");
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("relative".parse::<SlMode>(), Ok(SlMode::Relative));
        assert_eq!(SlMode::Absolute.to_string(), "absolute");
        assert!("both".parse::<SlMode>().is_err());
    }
}
