//! State surgery: overriding observations along a finite or infinite spine.

use super::state::{Behavior, FinalState};
use crate::error::{Error, Result};
use crate::theory::{Path, Signature, Sym};

struct Graft {
    base: FinalState,
    sym: Sym,
    index: usize,
}

impl Behavior for Graft {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        if sym == self.sym {
            (self.index, self.base.clone())
        } else {
            self.base.step(sym)
        }
    }
}

/// The state answering `index` to `sym` and continuing as `s` after it,
/// while behaving as `s` for every other symbol.
pub fn graft(s: &FinalState, sym: Sym, index: usize) -> Result<FinalState> {
    s.signature().check_index(sym, index)?;
    Ok(graft_unchecked(s, sym, index))
}

pub(crate) fn graft_unchecked(s: &FinalState, sym: Sym, index: usize) -> FinalState {
    FinalState::new(
        s.signature().clone(),
        Graft {
            base: s.clone(),
            sym,
            index,
        },
    )
}

/// Grafts a whole path: `(σ₁,i₁)⋯(σₙ,iₙ)` yields `σ₁,i₁` grafted onto
/// the result for the remaining steps.
pub fn graft_word(s: &FinalState, p: &Path) -> Result<FinalState> {
    s.signature().check_path(p)?;
    Ok(graft_word_unchecked(s, p))
}

pub(crate) fn graft_word_unchecked(s: &FinalState, p: &Path) -> FinalState {
    p.0.iter()
        .rev()
        .fold(s.clone(), |acc, &(sym, i)| graft_unchecked(&acc, sym, i))
}

/// An eventually periodic sequence: a finite prefix followed by a nonempty
/// cycle repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso<T> {
    prefix: Vec<T>,
    cycle: Vec<T>,
}

impl<T: Clone> Lasso<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        Ok(Lasso { prefix, cycle })
    }

    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[T] {
        &self.cycle
    }

    /// The element at position `k` (0-based).
    pub fn get(&self, k: usize) -> &T {
        if k < self.prefix.len() {
            &self.prefix[k]
        } else {
            &self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn head(&self) -> &T {
        self.get(0)
    }

    /// The sequence without its first element.
    pub fn tail(&self) -> Self {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Lasso {
                prefix: Vec::new(),
                cycle,
            }
        } else {
            Lasso {
                prefix: self.prefix[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }

    /// The sequence from position `k` on.
    pub fn shift(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |l, _| l.tail())
    }

    pub fn unroll(&self, n: usize) -> Vec<T> {
        (0..n).map(|k| self.get(k).clone()).collect()
    }
}

/// An infinite spine of (symbol, answer) pairs.
pub type InfinitePairSeq = Lasso<(Sym, usize)>;

struct Spine {
    base: FinalState,
    seq: InfinitePairSeq,
}

impl Behavior for Spine {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        let &(head, index) = self.seq.head();
        if sym == head {
            let next = Spine {
                base: self.base.clone(),
                seq: self.seq.tail(),
            };
            (index, FinalState::new(self.base.signature().clone(), next))
        } else {
            self.base.step(sym)
        }
    }
}

fn check_seq(sig: &Signature, seq: &InfinitePairSeq) -> Result<()> {
    seq.prefix()
        .iter()
        .chain(seq.cycle())
        .try_for_each(|&(s, i)| sig.check_index(s, i))
}

/// Grafts an infinite spine onto `s`.
///
/// Along the spine `τ₁τ₂⋯` the k-th state answers `i_k` to `τ_k` and
/// otherwise answers as `s`; leaving the spine by any other symbol
/// continues as the corresponding derivative of `s`.
pub fn graft_inf(s: &FinalState, seq: &InfinitePairSeq) -> Result<FinalState> {
    check_seq(s.signature(), seq)?;
    Ok(FinalState::new(
        s.signature().clone(),
        Spine {
            base: s.clone(),
            seq: seq.clone(),
        },
    ))
}
