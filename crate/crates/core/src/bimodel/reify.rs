//! Reification: recovering a residual comodel from a function between final
//! comodels by searching minimal decision trees for each output.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::trace::{trace, Region, TraceLimits};
use super::{normalize_copower, SplitModel, StraightFn};
use crate::bimodel::Provenance;
use crate::comodel::{anamorphism, graft_word_unchecked, FinalState, FiniteComodel};
use crate::error::{Error, Result, StraightnessWitness};
use crate::residual::{reflect, reflect_transducer, ResidualComodel, ResidualTransducer};
use crate::sample;
use crate::theory::{Path, Signature, Sym, Term};

/// Seed used for random probe states unless another is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Limits and probe configuration for [`reify`].
#[derive(Clone, Debug)]
pub struct ReifyBudget {
    /// Deepest decision tree tried for a single output.
    pub max_tree_depth: usize,
    /// Most input observations followed when tracing one output.
    pub max_trace_len: usize,
    /// Most evaluations of a function when tracing one output.
    pub max_trace_runs: usize,
    /// Output depth compared when deciding whether two states coincide.
    pub probe_depth: usize,
    /// States explored before returning; the rest are explored on demand.
    pub max_states: usize,
    /// Number of seeded random regular states in the probe set.
    pub random_probes: usize,
    /// Number of seeded generic (non-regular) states in the probe set.
    pub generic_probes: usize,
    pub seed: u64,
    /// Additional probe states over the input signature.
    pub extra_probes: Vec<FinalState>,
}

impl Default for ReifyBudget {
    fn default() -> Self {
        ReifyBudget {
            max_tree_depth: 4,
            max_trace_len: 16,
            max_trace_runs: 1 << 14,
            probe_depth: 6,
            max_states: 64,
            random_probes: 8,
            generic_probes: 8,
            seed: DEFAULT_SEED,
            extra_probes: Vec::new(),
        }
    }
}

impl ReifyBudget {
    pub fn with_tree_depth(mut self, d: usize) -> Self {
        self.max_tree_depth = d;
        self
    }

    pub fn with_max_states(mut self, k: usize) -> Self {
        self.max_states = k;
        self
    }

    pub fn with_probe_depth(mut self, d: usize) -> Self {
        self.probe_depth = d;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// The probe set over `sig`: constant states (every answer tuple when there
/// are at most 16, otherwise the diagonal ones), seeded random regular
/// states, seeded generic states, then the budget's extra probes.
pub fn probe_states(sig: &Signature, budget: &ReifyBudget) -> Vec<FinalState> {
    let arities: Vec<usize> = sig.decls().iter().map(|d| d.arity).collect();
    let total = arities
        .iter()
        .try_fold(1usize, |acc, &a| acc.checked_mul(a).filter(|&n| n <= 16));
    let tuples: Vec<Vec<usize>> = match total {
        Some(n) => (0..n)
            .map(|mut k| {
                arities
                    .iter()
                    .map(|&a| {
                        let i = k % a;
                        k /= a;
                        i
                    })
                    .collect()
            })
            .collect(),
        None => {
            let widest = arities.iter().copied().max().unwrap_or(1);
            (0..widest)
                .map(|k| arities.iter().map(|&a| k % a).collect())
                .collect()
        }
    };
    let mut out: Vec<FinalState> = tuples
        .into_iter()
        .map(|t| {
            let row = t.into_iter().map(|i| (i, 0)).collect();
            let m = FiniteComodel::new(sig.clone(), vec![row]).expect("constant machine");
            anamorphism(&m, 0).expect("state 0 exists")
        })
        .collect();
    let mut rng = sample::rng(budget.seed);
    out.extend((0..budget.random_probes).map(|_| sample::random_state(sig, 4, &mut rng)));
    out.extend(
        (0..budget.generic_probes)
            .map(|k| sample::generic_state(sig, budget.seed ^ ((k as u64) << 32))),
    );
    out.extend(budget.extra_probes.iter().cloned());
    out
}

/// A partial path of (symbol, answer) steps from the root of a tree.
type Trail = Vec<(Sym, usize)>;

/// A decision tree whose leaves carry the output and the path reaching them.
type Tree = Term<(usize, Path)>;

struct Search {
    in_sig: Signature,
    regions: Vec<Region>,
    built: HashMap<(Trail, usize), Option<Tree>>,
    witness: Option<(Trail, Vec<Option<usize>>)>,
}

impl Search {
    fn new(f: &StraightFn, tau: Sym, budget: &ReifyBudget) -> Self {
        let limits = TraceLimits {
            max_len: budget.max_trace_len,
            max_runs: budget.max_trace_runs,
        };
        Search {
            in_sig: f.in_signature().clone(),
            regions: trace(f, tau, limits),
            built: HashMap::new(),
            witness: None,
        }
    }

    fn all(&self) -> Vec<u32> {
        (0..self.regions.len() as u32).collect()
    }

    /// The common output of the given regions, or their distinct outputs.
    fn cell(&self, regs: &[u32]) -> std::result::Result<usize, Vec<Option<usize>>> {
        let mut seen: Vec<Option<usize>> = Vec::new();
        for &r in regs {
            let out = self.regions[r as usize].output;
            if !seen.contains(&out) {
                seen.push(out);
            }
        }
        match seen.as_slice() {
            [Some(b)] => Ok(*b),
            _ => Err(seen),
        }
    }

    /// Whether some region fixes a coordinate at or below `word·sym`.
    /// Reading any other symbol leaves the regions unchanged while moving
    /// past every coordinate they fix, so it cannot help.
    fn relevant(&self, regs: &[u32], word: &[Sym], sym: Sym) -> bool {
        regs.iter().any(|&r| {
            self.regions[r as usize].fixed.keys().any(|(w, s)| {
                w.len() >= word.len()
                    && w[..word.len()] == *word
                    && match w.get(word.len()) {
                        Some(&next) => next == sym,
                        None => *s == sym,
                    }
            })
        })
    }

    fn build(
        &mut self,
        p: &mut Vec<(Sym, usize)>,
        regs: &[u32],
        d: usize,
    ) -> Option<Term<(usize, Path)>> {
        let key = (p.clone(), d);
        if let Some(t) = self.built.get(&key) {
            return t.clone();
        }
        let t = match self.cell(regs) {
            Ok(b) => Some(Term::Var((b, Path(p.clone())))),
            Err(outputs) if d == 0 => {
                if self.witness.as_ref().is_none_or(|(w, _)| w.len() < p.len()) {
                    self.witness = Some((p.clone(), outputs));
                }
                None
            }
            Err(_) => self.branch(p, regs, d),
        };
        self.built.insert(key, t.clone());
        t
    }

    fn branch(
        &mut self,
        p: &mut Vec<(Sym, usize)>,
        regs: &[u32],
        d: usize,
    ) -> Option<Term<(usize, Path)>> {
        let sig = self.in_sig.clone();
        let word: Vec<Sym> = p.iter().map(|&(s, _)| s).collect();
        'symbols: for sym in sig.symbols() {
            if !self.relevant(regs, &word, sym) {
                continue;
            }
            let coord = (word.clone(), sym);
            let mut children = Vec::new();
            for i in 0..sig.arity_unchecked(sym) {
                let sub: Vec<u32> = regs
                    .iter()
                    .copied()
                    .filter(|&r| {
                        self.regions[r as usize]
                            .fixed
                            .get(&coord)
                            .is_none_or(|&j| j == i)
                    })
                    .collect();
                p.push((sym, i));
                let child = self.shallowest(p, &sub, d - 1);
                p.pop();
                match child {
                    Some(c) => children.push(c),
                    None => continue 'symbols,
                }
            }
            return Some(Term::App(sym, children));
        }
        None
    }

    fn shallowest(
        &mut self,
        p: &mut Vec<(Sym, usize)>,
        regs: &[u32],
        max: usize,
    ) -> Option<Term<(usize, Path)>> {
        (0..=max).find_map(|d| self.build(p, regs, d))
    }
}

fn search_tree(
    f: &StraightFn,
    tau: Sym,
    budget: &ReifyBudget,
    state: usize,
) -> Result<Term<(usize, Path)>> {
    let mut search = Search::new(f, tau, budget);
    let all = search.all();
    if let Some(t) = search.shallowest(&mut Vec::new(), &all, budget.max_tree_depth) {
        return Ok(t);
    }
    let (cell, outputs) = search.witness.expect("a failing search records a cell");
    let sig = f.in_signature();
    Err(Error::NotStraightWithinBudget(Box::new(
        StraightnessWitness {
            state,
            symbol: f.out_signature().name(tau),
            max_tree_depth: budget.max_tree_depth,
            cell: cell.iter().map(|&(s, i)| (sig.name(s), i)).collect(),
            outputs,
        },
    )))
}

/// The shallowest decision tree over the input signature whose cells each
/// fix the answer of `f` to `tau`, with leaves labelled by that answer.
///
/// Among trees of equal depth the first in signature order is returned,
/// preferring leaves to branches at every node. Whether a cell fixes the
/// answer is decided exactly, by tracing which input observations the
/// answer depends on.
pub fn determining_tree(f: &StraightFn, tau: Sym, budget: &ReifyBudget) -> Result<Term<usize>> {
    f.out_signature().arity(tau)?;
    let t = search_tree(f, tau, budget, 0)?;
    Ok(t.map_vars(|(b, _)| *b))
}

/// A leaf of a reified step: an output answer and the next state.
type Leaf = (usize, usize);

type Steps = Vec<Arc<Term<Leaf>>>;

struct Table {
    fns: Vec<StraightFn>,
    steps: Vec<Option<Steps>>,
    index: HashMap<Vec<u32>, usize>,
}

/// The residual comodel produced by [`reify`]. States are numbered in order
/// of discovery; states beyond the exploration budget are expanded when
/// first stepped.
pub struct ReifiedComodel {
    in_sig: Signature,
    out_sig: Signature,
    budget: ReifyBudget,
    probes: Vec<FinalState>,
    table: Mutex<Table>,
}

impl ReifiedComodel {
    fn new(f: &StraightFn, budget: &ReifyBudget) -> Self {
        ReifiedComodel {
            in_sig: f.in_signature().clone(),
            out_sig: f.out_signature().clone(),
            budget: budget.clone(),
            probes: probe_states(f.in_signature(), budget),
            table: Mutex::new(Table {
                fns: Vec::new(),
                steps: Vec::new(),
                index: HashMap::new(),
            }),
        }
    }

    fn fingerprint(&self, f: &StraightFn) -> Vec<u32> {
        let mut out = Vec::new();
        for s0 in &self.probes {
            f.call(s0).probe_flat(self.budget.probe_depth, &mut out);
        }
        out
    }

    fn intern(&self, table: &mut Table, f: StraightFn) -> usize {
        let key = self.fingerprint(&f);
        if let Some(&id) = table.index.get(&key) {
            return id;
        }
        let id = table.fns.len();
        table.index.insert(key, id);
        table.fns.push(f);
        table.steps.push(None);
        id
    }

    fn explore(&self, table: &mut Table, state: usize) -> Result<()> {
        if table.steps[state].is_some() {
            return Ok(());
        }
        let f = table.fns[state].clone();
        let mut steps = Vec::with_capacity(self.out_sig.len());
        for tau in self.out_sig.symbols() {
            let tree = search_tree(&f, tau, &self.budget, state)?;
            let with_fns = tree.map_vars(|(b, p)| (*b, continuation(&f, tau, p)));
            let normal = normalize_copower(&with_fns, &SplitModel).into_term();
            let step = normal.map_vars(|(b, g)| (*b, self.intern(table, g.clone())));
            steps.push(Arc::new(step));
        }
        table.steps[state] = Some(steps);
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.table.lock().unwrap().fns.len()
    }

    /// Number of states whose steps have been computed.
    pub fn explored_count(&self) -> usize {
        let t = self.table.lock().unwrap();
        t.steps.iter().filter(|s| s.is_some()).count()
    }

    /// Whether every discovered state has been expanded.
    pub fn is_closed(&self) -> bool {
        let t = self.table.lock().unwrap();
        t.steps.iter().all(Option::is_some)
    }

    /// The function a state stands for.
    pub fn state_fn(&self, state: usize) -> Result<StraightFn> {
        self.check_state(&state)?;
        Ok(self.table.lock().unwrap().fns[state].clone())
    }

    /// The finite transducer of all discovered states, if exploration has
    /// closed.
    pub fn to_transducer(&self) -> Result<ResidualTransducer> {
        let t = self.table.lock().unwrap();
        let table: Option<Vec<Vec<Term<Leaf>>>> = t
            .steps
            .iter()
            .map(|row| Some(row.as_ref()?.iter().map(|t| (**t).clone()).collect()))
            .collect();
        let table = table.ok_or_else(|| {
            Error::NotFinitelyPresentable(format!(
                "{} states discovered, {} expanded",
                t.fns.len(),
                t.steps.iter().filter(|s| s.is_some()).count()
            ))
        })?;
        ResidualTransducer::new(self.in_sig.clone(), self.out_sig.clone(), table)
    }
}

impl ResidualComodel for ReifiedComodel {
    type State = usize;

    fn in_signature(&self) -> &Signature {
        &self.in_sig
    }

    fn out_signature(&self) -> &Signature {
        &self.out_sig
    }

    fn check_state(&self, state: &usize) -> Result<()> {
        let count = self.state_count();
        if *state < count {
            Ok(())
        } else {
            Err(Error::InvalidState {
                state: *state,
                count,
            })
        }
    }

    fn step(&self, state: &usize, sym: Sym) -> Result<crate::residual::Step<usize>> {
        self.out_sig.arity(sym)?;
        let mut table = self.table.lock().unwrap();
        if *state >= table.fns.len() {
            return Err(Error::InvalidState {
                state: *state,
                count: table.fns.len(),
            });
        }
        self.explore(&mut table, *state)?;
        Ok(table.steps[*state].as_ref().expect("explored")[sym.0].clone())
    }
}

/// `s ↦ ∂_τ f(^p s)`: what remains of `f` once the answer to `tau` has been
/// read off along `p`.
fn continuation(f: &StraightFn, tau: Sym, p: &Path) -> StraightFn {
    let (f, p) = (f.clone(), p.clone());
    StraightFn::new(
        f.in_signature().clone(),
        f.out_signature().clone(),
        Provenance::Reified,
        move |s| f.call(&graft_word_unchecked(s, &p)).step(tau).1,
    )
}

/// The result of [`reify`]: a residual comodel and the state standing for
/// the reified function (always state 0).
#[derive(Clone)]
pub struct Reified {
    comodel: Arc<ReifiedComodel>,
}

impl std::fmt::Debug for Reified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reified")
            .field("states", &self.comodel.state_count())
            .field("explored", &self.comodel.explored_count())
            .finish()
    }
}

impl Reified {
    pub fn comodel(&self) -> &Arc<ReifiedComodel> {
        &self.comodel
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn is_closed(&self) -> bool {
        self.comodel.is_closed()
    }

    pub fn to_transducer(&self) -> Result<ResidualTransducer> {
        self.comodel.to_transducer()
    }

    /// The function computed by the root state.
    pub fn reflect(&self) -> StraightFn {
        reflect(&self.comodel, 0).expect("root state exists")
    }
}

/// Reifies `f` into a residual comodel.
///
/// Each state's answer to an output symbol is computed by the shallowest
/// determining decision tree (see [`determining_tree`]); the continuations at
/// its leaves are normalized as a copower and identified when their outputs
/// agree on every probe state up to the probe depth. Up to
/// `budget.max_states` states are explored eagerly; the rest are explored
/// when first observed.
///
/// Fails with `NotStraightWithinBudget` when some eagerly explored state has
/// an output with no determining tree within the depth budget. The same
/// failure in a state explored on demand panics, since observation is
/// infallible.
pub fn reify(f: &StraightFn, budget: &ReifyBudget) -> Result<Reified> {
    let comodel = Arc::new(ReifiedComodel::new(f, budget));
    {
        let mut table = comodel.table.lock().unwrap();
        comodel.intern(&mut table, f.clone());
        let mut next = 0;
        while next < table.fns.len() && next < budget.max_states {
            comodel.explore(&mut table, next)?;
            next += 1;
        }
    }
    Ok(Reified { comodel })
}

/// Reifies the function computed by a transducer state, giving its
/// canonical presentation.
pub fn canonicalize(
    tr: &ResidualTransducer,
    state: usize,
    budget: &ReifyBudget,
) -> Result<Reified> {
    reify(&reflect_transducer(tr, state)?, budget)
}
