//! Strictly incremental constituent parsing.
//!
//! Two decoders share one treebank layer: a sequence-labeling linearization
//! ([`sl_codec`]) and the attach-juxtapose transition system
//! ([`attach_juxtapose`]). [`incremental_model`] trains greedy classifiers for
//! both under a delay-`k` prefix contract, and [`evaluation`] scores the
//! output with labeled bracketing F1.

pub mod attach_juxtapose;
pub mod evaluation;
pub mod incremental_model;
pub mod sl_codec;
pub mod synth;
pub mod treebank;

pub use treebank::{ConstituentTree, Sentence, Span, TreeNode};
