//! Greedy incremental classifiers for both decoders.
//!
//! Decisions at token `i` may look at `w_1..w_{i+k}` and at earlier
//! decisions, never further. [`window`] is the only place tokens are read,
//! so the delay bound holds by construction for every feature template.

mod audit;
mod features;
mod model;
mod perceptron;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attach_juxtapose::AjError;
use crate::sl_codec::SlError;
use crate::treebank::{Sentence, TreebankError};

pub use audit::{audit_incrementality, generate_pairs, AuditReport, IncrementalPredictor, PairAudit, PeekLastToken, SentencePair};
pub use features::{extract_sl_features, extract_tb_features, FeatureVector};
pub use model::{
    action_class, predict_actions, predict_labels, train_sl, train_tb, training_accuracy, DecoderKind, LinearModel,
    ModelMeta, Parser, TrainConfig, MODEL_FORMAT_VERSION, MODEL_MAGIC,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("empty training corpus")]
    EmptyCorpus,
    #[error("delay {0} is above 2; enable large delays explicitly")]
    DelayTooLarge(usize),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("model was trained for the {found} decoder, {expected} requested")]
    WrongDecoder { found: String, expected: String },
    #[error("malformed model file: {0}")]
    Format(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Treebank(#[from] TreebankError),
    #[error(transparent)]
    Labels(#[from] SlError),
    #[error(transparent)]
    Transitions(#[from] AjError),
}

pub const PAD: &str = "<PAD>";

/// Lookahead and context width of the token window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayConfig {
    /// Tokens of lookahead beyond the current one.
    pub k: usize,
    /// Tokens of left context.
    pub context: usize,
    pub pad: String,
}

impl DelayConfig {
    /// Delays above 2 need `allow_large`.
    pub fn new(k: usize, allow_large: bool) -> Result<Self, ModelError> {
        if k > 2 && !allow_large {
            return Err(ModelError::DelayTooLarge(k));
        }
        Ok(DelayConfig { k, context: 2, pad: PAD.to_string() })
    }

    pub fn with_context(mut self, context: usize) -> Self {
        self.context = context;
        self
    }
}

impl Default for DelayConfig {
    fn default() -> Self {
        DelayConfig { k: 1, context: 2, pad: PAD.to_string() }
    }
}

/// Tokens `w_{i-c}..w_{i+k}` around 0-based position `i`, padded outside the sentence.
pub fn window<'a>(sentence: &'a Sentence, i: usize, cfg: &'a DelayConfig) -> Vec<&'a str> {
    let lo = i as isize - cfg.context as isize;
    let hi = (i + cfg.k) as isize;
    (lo..=hi)
        .map(|j| {
            if j < 0 || j as usize >= sentence.len() {
                cfg.pad.as_str()
            } else {
                sentence.tokens[j as usize].as_str()
            }
        })
        .collect()
}

/// POS tags aligned with [`window`]; `None` when the sentence is untagged.
pub fn pos_window<'a>(sentence: &'a Sentence, i: usize, cfg: &'a DelayConfig) -> Option<Vec<&'a str>> {
    let tags = sentence.pos_tags.as_ref()?;
    let lo = i as isize - cfg.context as isize;
    let hi = (i + cfg.k) as isize;
    Some(
        (lo..=hi)
            .map(|j| if j < 0 || j as usize >= tags.len() { cfg.pad.as_str() } else { tags[j as usize].as_str() })
            .collect(),
    )
}
