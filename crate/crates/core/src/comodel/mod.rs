//! Comodels of free theories and the final comodel of lazily observed
//! behaviors.

mod graft;
mod machine;
mod state;

pub use graft::{graft, graft_inf, graft_word, InfinitePairSeq, Lasso};
pub(crate) use graft::{graft_unchecked, graft_word_unchecked};
pub use machine::{anamorphism, FiniteComodel};
pub use state::{op_equiv, Behavior, FinalState};

use crate::error::Result;
use crate::theory::{Path, Term};

/// Runs `t` against `s`: each request is answered by the state, which then
/// advances, until a variable leaf is reached.
pub fn derived_coop<'t, V>(t: &'t Term<V>, s: &FinalState) -> Result<(&'t V, FinalState)> {
    s.signature().check_term(t)?;
    let (v, rest) = walk_to(t, s);
    Ok((v, rest))
}

/// Whether `s` lies in the sub-basic set of states on which `t` returns `v`.
pub fn in_subbasis<V: PartialEq>(s: &FinalState, t: &Term<V>, v: &V) -> Result<bool> {
    derived_coop(t, s).map(|(w, _)| w == v)
}

/// The root-to-leaf path of `t` selected by the answers of `s`.
pub fn path_along<V>(t: &Term<V>, s: &FinalState) -> Result<Path> {
    s.signature().check_term(t)?;
    Ok(walk(t, s).1)
}

/// Like [`walk`] without recording the path.
pub(crate) fn walk_to<'t, V>(t: &'t Term<V>, s: &FinalState) -> (&'t V, FinalState) {
    let mut cur = t;
    let mut state = s.clone();
    while let Term::App(sym, children) = cur {
        let (i, next) = state.step(*sym);
        cur = &children[i];
        state = next;
    }
    match cur {
        Term::Var(v) => (v, state),
        Term::App(..) => unreachable!("loop stops at a leaf"),
    }
}

pub(crate) fn walk<'t, V>(t: &'t Term<V>, s: &FinalState) -> (&'t V, Path, FinalState) {
    let mut cur = t;
    let mut state = s.clone();
    let mut path = Vec::new();
    loop {
        match cur {
            Term::Var(v) => return (v, Path(path), state),
            Term::App(sym, children) => {
                let (i, next) = state.step(*sym);
                path.push((*sym, i));
                cur = &children[i];
                state = next;
            }
        }
    }
}
