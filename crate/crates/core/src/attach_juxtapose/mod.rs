//! The attach-juxtapose transition system.
//!
//! A parser state is a partial tree over `w_1..w_{i-1}`. Each step reads one
//! token and either *attaches* it (optionally under a fresh parent) as the new
//! rightmost child of a node on the rightmost chain, or *juxtaposes* it: a
//! fresh node takes the place of a chain node, keeping that node as its left
//! child and the new material as its right child.

mod action;
mod oracle;
mod state;

use thiserror::Error;

pub use action::{format_record, parse_record, Action, ActionKind, Target};
pub use oracle::oracle;
pub use state::{check_monotonic, legal_actions, replay, replay_states, rightmost_chain, ParserState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AjError {
    #[error("tree is empty")]
    EmptyTree,
    #[error("target {tgt} is outside the rightmost chain (length {chain_len})")]
    IllegalTarget { tgt: String, chain_len: usize },
    #[error("juxtapose requires a new node label")]
    JuxtaposeWithoutNew,
    #[error("attach does not take a new node label")]
    AttachWithNew,
    #[error("the empty-tree target is only valid for the first action")]
    NonEmptyTreeOnFirstAction,
    #[error("the first action must create a parent for the first token")]
    InitWithoutParent,
    #[error("expected token {expected}, got {got}")]
    TokenOutOfOrder { expected: usize, got: usize },
    #[error("tree contains a unary chain; collapse it first")]
    UnaryChainPresent,
    #[error("{actions} actions for {tokens} tokens")]
    LengthMismatch { actions: usize, tokens: usize },
    #[error("cannot parse action {0:?}")]
    BadAction(String),
    #[error("bad action record: {0}")]
    BadRecord(String),
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<AjError>,
    },
}
