//! A text format for signatures, machines, transducers, stream processors,
//! streams and terms, plus expressions naming states and functions.
//!
//! ```text
//! (sig bits (read 2))
//! (comodel alt bits (state q0 (read 0 q1)) (state q1 (read 1 q0)))
//! (transducer neg (in bits) (out bits)
//!   (state p0 (read (read (leaf 1 p0) (leaf 0 p0)))))
//! (ghp swap (input 2) (alphabet a b)
//!   (state t0 (read (leaf b t0) (leaf a t0))))
//! (stream s (arity 2) (prefix 1) (cycle 0 1))
//! (term t bits (read x y))
//! ```

mod document;
mod expr;
pub mod sexpr;

pub use document::{Document, Form, Item};
pub use expr::{eval_fn, eval_spine, eval_state, eval_term};

use thiserror::Error;

use crate::error::Error;

/// Errors raised while reading documents and expressions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unknown {kind} `{name}`")]
    UnknownReference { kind: String, name: String },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error(transparent)]
    Validation(#[from] Error),
}

impl DslError {
    /// A short tag naming the kind of error, for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            DslError::Syntax { .. } => "syntax",
            DslError::UnknownReference { .. } => "unknown-reference",
            DslError::DuplicateName(_) => "duplicate-name",
            DslError::Validation(e) => e.kind(),
        }
    }
}

pub(crate) fn at(pos: sexpr::Pos, msg: impl Into<String>) -> DslError {
    DslError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

pub(crate) fn unknown(kind: &str, name: &str) -> DslError {
    DslError::UnknownReference {
        kind: kind.into(),
        name: name.into(),
    }
}
