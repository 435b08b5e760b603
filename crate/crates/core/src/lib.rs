//! Free algebraic theories, their comodels, tree transducers, and the
//! correspondence between transducers and straight functions on final
//! comodels.

pub mod bimodel;
pub mod cli;
pub mod comodel;
pub mod dsl;
pub mod error;
pub mod residual;
pub mod sample;
pub mod streams;
pub mod theory;

pub use error::{Error, Result, StraightnessWitness};
