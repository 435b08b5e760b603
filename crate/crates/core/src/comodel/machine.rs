use std::collections::HashMap;
use std::sync::Arc;

use super::state::{Behavior, FinalState};
use crate::error::{Error, Result};
use crate::theory::{Signature, Sym};

/// A finite comodel: a state machine answering every request and moving to
/// a next state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteComodel(Arc<Machine>);

#[derive(Debug, PartialEq, Eq)]
struct Machine {
    sig: Signature,
    // table[state][symbol] = (answer, next state)
    table: Vec<Vec<(usize, usize)>>,
}

impl FiniteComodel {
    /// `table[q][σ]` is the answer of state `q` to `σ` and its next state.
    pub fn new(sig: Signature, table: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidState { state: 0, count: 0 });
        }
        let count = table.len();
        for row in &table {
            if row.len() != sig.len() {
                return Err(Error::SignatureMismatch(format!(
                    "machine row has {} entries for {} symbols",
                    row.len(),
                    sig.len()
                )));
            }
            for (s, &(out, next)) in sig.symbols().zip(row) {
                sig.check_index(s, out)?;
                if next >= count {
                    return Err(Error::InvalidState { state: next, count });
                }
            }
        }
        Ok(FiniteComodel(Arc::new(Machine { sig, table })))
    }

    pub fn signature(&self) -> &Signature {
        &self.0.sig
    }

    pub fn state_count(&self) -> usize {
        self.0.table.len()
    }

    pub fn transition(&self, state: usize, sym: Sym) -> Result<(usize, usize)> {
        self.check_state(state)?;
        self.0.sig.arity(sym)?;
        Ok(self.0.table[state][sym.0])
    }

    pub fn check_state(&self, state: usize) -> Result<()> {
        if state < self.state_count() {
            Ok(())
        } else {
            Err(Error::InvalidState {
                state,
                count: self.state_count(),
            })
        }
    }

    /// Bisimilarity classes by partition refinement. Classes are numbered in
    /// order of their first member.
    pub fn bisimulation_classes(&self) -> Vec<usize> {
        let n = self.state_count();
        let outputs = |q: usize| self.0.table[q].iter().map(|&(o, _)| o).collect::<Vec<_>>();
        let mut class = renumber((0..n).map(outputs).collect());
        loop {
            let keys: Vec<(usize, Vec<usize>)> = (0..n)
                .map(|q| {
                    let succ = self.0.table[q].iter().map(|&(_, nx)| class[nx]).collect();
                    (class[q], succ)
                })
                .collect();
            let refined = renumber(keys);
            if refined.iter().max() == class.iter().max() {
                return refined;
            }
            class = refined;
        }
    }

    /// The quotient by bisimilarity, with the class map of the original states.
    pub fn quotient(&self) -> (FiniteComodel, Vec<usize>) {
        let class = self.bisimulation_classes();
        let k = class.iter().max().map_or(0, |m| m + 1);
        let mut table = vec![Vec::new(); k];
        for q in 0..self.state_count() {
            if table[class[q]].is_empty() {
                table[class[q]] = self.0.table[q]
                    .iter()
                    .map(|&(o, nx)| (o, class[nx]))
                    .collect();
            }
        }
        let m = FiniteComodel(Arc::new(Machine {
            sig: self.0.sig.clone(),
            table,
        }));
        (m, class)
    }
}

fn renumber<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let mut out = Vec::with_capacity(keys.len());
    for k in keys {
        let next = ids.len();
        out.push(*ids.entry(k).or_insert(next));
    }
    out
}

struct MachineNode {
    machine: FiniteComodel,
    state: usize,
}

impl Behavior for MachineNode {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        let (out, next) = self.machine.0.table[self.state][sym.0];
        (out, machine_state(&self.machine, next))
    }
}

fn machine_state(m: &FiniteComodel, state: usize) -> FinalState {
    FinalState::new(
        m.signature().clone(),
        MachineNode {
            machine: m.clone(),
            state,
        },
    )
}

/// The image of `state` under the unique comodel morphism into the final
/// comodel.
pub fn anamorphism(m: &FiniteComodel, state: usize) -> Result<FinalState> {
    m.check_state(state)?;
    Ok(machine_state(m, state))
}
