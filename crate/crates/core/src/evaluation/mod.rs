//! Labeled bracketing scores and treebank statistics.

mod params;
mod score;
mod stats;

use thiserror::Error;

pub use params::EvalParams;
pub use score::{per_constituent, score, EvalReport, LabelScore};
pub use stats::{corpus_stats, format_stats_table, LabelStat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("corpus length mismatch at sentence {index}: gold has {gold}, predicted has {pred}")]
    LengthMismatch { index: usize, gold: usize, pred: usize },
    #[error("sentence {index}: gold has {gold} tokens, predicted has {pred}")]
    TokenMismatch { index: usize, gold: usize, pred: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("parameter file line {line}: {message}")]
    BadParams { line: usize, message: String },
}
