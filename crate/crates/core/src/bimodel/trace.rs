//! Exact dependency tracing: which input observations fix one output of a
//! function.
//!
//! A function reaches its argument only through observations, so running it
//! on an instrumented state and branching on the first unanswered
//! observation enumerates a partition of the input space into regions on
//! which the output is constant.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::StraightFn;
use crate::comodel::{Behavior, FinalState};
use crate::theory::{Signature, Sym};

/// An input coordinate: the answer to `sym` after the requests in the word.
pub(crate) type Coord = (Vec<Sym>, Sym);

/// A region of inputs fixed by finitely many coordinates, with the output
/// there (`None` when tracing stopped before the output was fixed).
#[derive(Clone, Debug)]
pub(crate) struct Region {
    pub fixed: HashMap<Coord, usize>,
    pub output: Option<usize>,
}

/// Limits for [`trace`].
#[derive(Clone, Copy, Debug)]
pub(crate) struct TraceLimits {
    /// Most coordinates fixed along one branch.
    pub max_len: usize,
    /// Most runs of the function.
    pub max_runs: usize,
}

struct Ctx {
    fixed: HashMap<Coord, usize>,
    pending: Mutex<Option<Coord>>,
}

struct Tracer {
    sig: Signature,
    word: Vec<Sym>,
    ctx: Arc<Ctx>,
}

impl Behavior for Tracer {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        let coord = (self.word.clone(), sym);
        let answer = match self.ctx.fixed.get(&coord) {
            Some(&i) => i,
            None => {
                self.ctx.pending.lock().unwrap().get_or_insert(coord);
                0
            }
        };
        let mut word = self.word.clone();
        word.push(sym);
        let next = Tracer {
            sig: self.sig.clone(),
            word,
            ctx: self.ctx.clone(),
        };
        (answer, FinalState::new(self.sig.clone(), next))
    }
}

/// The regions on which the answer of `f` to `tau` is constant.
pub(crate) fn trace(f: &StraightFn, tau: Sym, limits: TraceLimits) -> Vec<Region> {
    let mut regions = Vec::new();
    let mut runs = limits.max_runs;
    explore(
        f,
        tau,
        HashMap::new(),
        limits.max_len,
        &mut runs,
        &mut regions,
    );
    regions
}

fn explore(
    f: &StraightFn,
    tau: Sym,
    fixed: HashMap<Coord, usize>,
    max_len: usize,
    runs: &mut usize,
    out: &mut Vec<Region>,
) {
    let sig = f.in_signature().clone();
    let ctx = Arc::new(Ctx {
        fixed,
        pending: Mutex::new(None),
    });
    let root = Tracer {
        sig: sig.clone(),
        word: Vec::new(),
        ctx: ctx.clone(),
    };
    let answer = f.call(&FinalState::new(sig.clone(), root)).step(tau).0;
    *runs = runs.saturating_sub(1);
    let ctx = Arc::try_unwrap(ctx).unwrap_or_else(|shared| Ctx {
        fixed: shared.fixed.clone(),
        pending: Mutex::new(shared.pending.lock().unwrap().clone()),
    });
    let pending = ctx.pending.into_inner().unwrap();
    match pending {
        None => out.push(Region {
            fixed: ctx.fixed,
            output: Some(answer),
        }),
        Some(_) if ctx.fixed.len() >= max_len || *runs == 0 => out.push(Region {
            fixed: ctx.fixed,
            output: None,
        }),
        Some(coord) => {
            for i in 0..sig.arity_unchecked(coord.1) {
                let mut next = ctx.fixed.clone();
                next.insert(coord.clone(), i);
                explore(f, tau, next, max_len, runs, out);
            }
        }
    }
}

/// The coordinates a path fixes.
#[cfg(test)]
fn path_coords(p: &[(Sym, usize)]) -> Vec<(Coord, usize)> {
    let mut word = Vec::new();
    p.iter()
        .map(|&(s, i)| {
            let c = ((word.clone(), s), i);
            word.push(s);
            c
        })
        .collect()
}

/// The common output of every region meeting the cell of `p`, or the
/// distinct outputs found there.
#[cfg(test)]
fn cell_output(regions: &[Region], p: &[(Sym, usize)]) -> Result<usize, Vec<Option<usize>>> {
    let coords = path_coords(p);
    let mut seen: Vec<Option<usize>> = Vec::new();
    for r in regions {
        let meets = coords
            .iter()
            .all(|(c, i)| r.fixed.get(c).is_none_or(|j| j == i));
        if meets && !seen.contains(&r.output) {
            seen.push(r.output);
        }
    }
    match seen.as_slice() {
        [Some(b)] => Ok(*b),
        _ => Err(seen),
    }
}
