use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` has arity 0")]
    ZeroArity(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("invalid state {state} (machine has {count} states)")]
    InvalidState { state: usize, count: usize },
    #[error("index {index} out of range for `{symbol}` of arity {arity}")]
    IndexOutOfRange {
        symbol: String,
        index: usize,
        arity: usize,
    },
    #[error("lasso has an empty cycle")]
    EmptyCycle,
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("arity mismatch for `{symbol}`: expected {expected} branches, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    NotStraightWithinBudget(Box<StraightnessWitness>),
    #[error("not finitely presentable: {0}")]
    NotFinitelyPresentable(String),
}

impl Error {
    /// A short tag naming the kind of error, for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateSymbol(_) => "duplicate-symbol",
            Error::ZeroArity(_) => "zero-arity",
            Error::UnboundVariable(_) => "unbound-variable",
            Error::UnknownSymbol(_) => "unknown-symbol",
            Error::InvalidState { .. } => "invalid-state",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::EmptyCycle => "empty-cycle",
            Error::SignatureMismatch(_) => "signature-mismatch",
            Error::ArityMismatch { .. } => "arity-mismatch",
            Error::NotStraightWithinBudget(_) => "not-straight-within-budget",
            Error::NotFinitelyPresentable(_) => "not-finitely-presentable",
        }
    }
}

/// Context reported when no determining decision tree was found.
///
/// `cell` is a root-to-node path of input observations on which the next
/// output is still not fixed; `outputs` lists the distinct outputs found
/// there, with `None` for inputs on which tracing ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StraightnessWitness {
    pub state: usize,
    pub symbol: String,
    pub max_tree_depth: usize,
    pub cell: Vec<(String, usize)>,
    pub outputs: Vec<Option<usize>>,
}

impl fmt::Display for StraightnessWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no determining tree of depth <= {} for output `{}` of reified state {} (cell [",
            self.max_tree_depth, self.symbol, self.state
        )?;
        for (k, (sym, i)) in self.cell.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{sym}.{i}")?;
        }
        f.write_str("], outputs")?;
        for o in &self.outputs {
            match o {
                Some(b) => write!(f, " {b}")?,
                None => f.write_str(" ?")?,
            }
        }
        f.write_str(")")
    }
}
