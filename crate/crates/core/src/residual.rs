//! Residual comodels: tree transducers answering each output request with
//! a computation over the input theory.

use std::collections::hash_map::{Entry, HashMap};
use std::sync::Arc;

use crate::bimodel::{Provenance, StraightFn};
use crate::comodel::{walk_to, FinalState};
use crate::error::{Error, Result};
use crate::theory::{Signature, Sym, Term};

/// A step of a residual comodel: an input computation whose leaves pair an
/// output answer with the next state.
pub type Step<S> = Arc<Term<(usize, S)>>;

/// A comodel of the output theory in the Kleisli category of the input
/// theory: each output request yields an input term whose leaves pair an
/// answer with the next state.
pub trait ResidualComodel: Send + Sync + 'static {
    type State: Clone + Eq + std::hash::Hash + Send + Sync + 'static;

    fn in_signature(&self) -> &Signature;

    fn out_signature(&self) -> &Signature;

    fn check_state(&self, _state: &Self::State) -> Result<()> {
        Ok(())
    }

    /// The computation answering `sym` from `state`. Leaf answers must be
    /// below the arity of `sym`.
    fn step(&self, state: &Self::State, sym: Sym) -> Result<Step<Self::State>>;
}

/// A finite-state tree transducer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualTransducer(Arc<TransducerData>);

#[derive(Debug, PartialEq, Eq)]
struct TransducerData {
    in_sig: Signature,
    out_sig: Signature,
    // table[state][out symbol]
    table: Vec<Vec<Step<usize>>>,
}

impl ResidualTransducer {
    /// `table[q][τ]` is the input term answering `τ` in state `q`, with
    /// leaves `(answer, next state)`.
    pub fn new(
        in_sig: Signature,
        out_sig: Signature,
        table: Vec<Vec<Term<(usize, usize)>>>,
    ) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidState { state: 0, count: 0 });
        }
        let count = table.len();
        for row in &table {
            if row.len() != out_sig.len() {
                return Err(Error::SignatureMismatch(format!(
                    "transducer row has {} entries for {} output symbols",
                    row.len(),
                    out_sig.len()
                )));
            }
            for (tau, t) in out_sig.symbols().zip(row) {
                in_sig.check_term(t)?;
                for &(i, next) in t.vars() {
                    out_sig.check_index(tau, i)?;
                    if next >= count {
                        return Err(Error::InvalidState { state: next, count });
                    }
                }
            }
        }
        Ok(ResidualTransducer(Arc::new(TransducerData {
            in_sig,
            out_sig,
            table: table
                .into_iter()
                .map(|row| row.into_iter().map(Arc::new).collect())
                .collect(),
        })))
    }

    pub fn state_count(&self) -> usize {
        self.0.table.len()
    }

    pub fn term(&self, state: usize, sym: Sym) -> Result<&Term<(usize, usize)>> {
        self.check_state(&state)?;
        self.0.out_sig.arity(sym)?;
        Ok(&self.0.table[state][sym.0])
    }

    /// Whether some step of some state consumes input.
    pub fn reads_input(&self) -> bool {
        self.0.table.iter().flatten().any(|t| !t.is_var())
    }
}

impl ResidualComodel for ResidualTransducer {
    type State = usize;

    fn in_signature(&self) -> &Signature {
        &self.0.in_sig
    }

    fn out_signature(&self) -> &Signature {
        &self.0.out_sig
    }

    fn check_state(&self, state: &usize) -> Result<()> {
        if *state < self.state_count() {
            Ok(())
        } else {
            Err(Error::InvalidState {
                state: *state,
                count: self.state_count(),
            })
        }
    }

    fn step(&self, state: &usize, sym: Sym) -> Result<Arc<Term<(usize, usize)>>> {
        self.check_state(state)?;
        self.0.out_sig.arity(sym)?;
        Ok(self.0.table[*state][sym.0].clone())
    }
}

/// The derived residual co-operation of an output term: each output request
/// is replaced by the state's input computation, threading states through
/// the leaves.
pub fn derived_residual<R: ResidualComodel, V: Clone>(
    r: &R,
    t: &Term<V>,
    state: &R::State,
) -> Result<Term<(V, R::State)>> {
    r.check_state(state)?;
    r.out_signature().check_term(t)?;
    go(r, t, state)
}

fn go<R: ResidualComodel, V: Clone>(
    r: &R,
    t: &Term<V>,
    state: &R::State,
) -> Result<Term<(V, R::State)>> {
    match t {
        Term::Var(v) => Ok(Term::Var((v.clone(), state.clone()))),
        Term::App(sym, children) => {
            r.step(state, *sym)?
                .try_bind(&mut |(i, next): &(usize, R::State)| go(r, &children[*i], next))
        }
    }
}

/// One observation of the tensor product of a residual state with an
/// environment: the state's computation for `sym` is run against `env`.
pub fn tensor_observe<R: ResidualComodel>(
    r: &R,
    state: &R::State,
    env: &FinalState,
    sym: Sym,
) -> Result<(usize, R::State, FinalState)> {
    r.check_state(state)?;
    r.out_signature().arity(sym)?;
    if env.signature() != r.in_signature() {
        return Err(Error::SignatureMismatch(
            "environment is not over the transducer's input signature".into(),
        ));
    }
    let t = r.step(state, sym)?;
    let ((i, next), rest) = walk_to(&t, env);
    Ok((*i, next.clone(), rest))
}

struct TensorNode<R: ResidualComodel> {
    r: Arc<R>,
    state: R::State,
    env: FinalState,
}

impl<R: ResidualComodel> crate::comodel::Behavior for TensorNode<R> {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        let t = self
            .r
            .step(&self.state, sym)
            .unwrap_or_else(|e| panic!("residual step failed during lazy evaluation: {e}"));
        let ((i, next), rest) = walk_to(&t, &self.env);
        (*i, tensor_state(&self.r, next.clone(), rest))
    }
}

fn tensor_state<R: ResidualComodel>(r: &Arc<R>, state: R::State, env: FinalState) -> FinalState {
    FinalState::new(
        r.out_signature().clone(),
        TensorNode {
            r: r.clone(),
            state,
            env,
        },
    )
}

/// The function on final comodels computed by a residual state: each
/// environment is sent to the behavior of the tensor product at
/// `(state, env)`.
///
/// Outputs are evaluated lazily. For residual comodels whose steps can fail
/// (such as lazily explored reifications), a failing step panics when the
/// corresponding output is demanded.
pub fn reflect<R: ResidualComodel>(r: &Arc<R>, state: R::State) -> Result<StraightFn> {
    r.check_state(&state)?;
    let r = r.clone();
    Ok(StraightFn::new(
        r.in_signature().clone(),
        r.out_signature().clone(),
        Provenance::Reflected,
        move |env| tensor_state(&r, state.clone(), env.clone()),
    ))
}

/// [`reflect`] for a finite transducer.
pub fn reflect_transducer(tr: &ResidualTransducer, state: usize) -> Result<StraightFn> {
    reflect(&Arc::new(tr.clone()), state)
}

/// Bounded bisimilarity of residual states: the step terms agree in shape
/// and answers for every output word of length at most `depth`, with leaf
/// states related pairwise.
pub fn residual_bisimilar<A: ResidualComodel, B: ResidualComodel>(
    a: &A,
    qa: &A::State,
    b: &B,
    qb: &B::State,
    depth: usize,
) -> Result<bool> {
    if a.in_signature() != b.in_signature() || a.out_signature() != b.out_signature() {
        return Err(Error::SignatureMismatch(
            "residual comodels over different theories".into(),
        ));
    }
    // A pair already checked with at least `d` steps to go needs no recheck.
    let mut checked: HashMap<(A::State, B::State), usize> = HashMap::new();
    let mut pending = vec![(qa.clone(), qb.clone(), depth)];
    while let Some((x, y, d)) = pending.pop() {
        match checked.entry((x.clone(), y.clone())) {
            Entry::Occupied(e) if *e.get() >= d => continue,
            Entry::Occupied(mut e) => {
                e.insert(d);
            }
            Entry::Vacant(e) => {
                e.insert(d);
            }
        }
        for tau in a.out_signature().symbols() {
            let (tx, ty) = (a.step(&x, tau)?, b.step(&y, tau)?);
            let mut pairs = Vec::new();
            if !same_shape(&*tx, &*ty, &mut pairs) {
                return Ok(false);
            }
            if d > 0 {
                pending.extend(pairs.into_iter().map(|(p, q)| (p, q, d - 1)));
            }
        }
    }
    Ok(true)
}

fn same_shape<X: Clone, Y: Clone>(
    a: &Term<(usize, X)>,
    b: &Term<(usize, Y)>,
    pairs: &mut Vec<(X, Y)>,
) -> bool {
    match (a, b) {
        (Term::Var((i, x)), Term::Var((j, y))) => {
            pairs.push((x.clone(), y.clone()));
            i == j
        }
        (Term::App(s, xs), Term::App(t, ys)) => {
            s == t && xs.iter().zip(ys).all(|(x, y)| same_shape(x, y, pairs))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodel::{anamorphism, op_equiv, FiniteComodel};

    fn bits() -> Signature {
        Signature::new([("read", 2)]).unwrap()
    }

    fn negation() -> ResidualTransducer {
        let t = Term::app(Sym(0), vec![Term::var((1, 0)), Term::var((0, 0))]);
        ResidualTransducer::new(bits(), bits(), vec![vec![t]]).unwrap()
    }

    fn alternator() -> FinalState {
        let m = FiniteComodel::new(bits(), vec![vec![(0, 1)], vec![(1, 0)]]).unwrap();
        anamorphism(&m, 0).unwrap()
    }

    #[test]
    fn negation_observes_one_letter() {
        let (i, q, rest) = tensor_observe(&negation(), &0, &alternator(), Sym(0)).unwrap();
        assert_eq!((i, q), (1, 0));
        assert_eq!(rest.output(Sym(0)).unwrap(), 1);
    }

    #[test]
    fn negation_reflects_to_complement() {
        let f = reflect_transducer(&negation(), 0).unwrap();
        let out = f.apply(&alternator()).unwrap();
        let letters: Vec<usize> = out.probe(3).into_iter().map(|t| t[0]).collect();
        assert_eq!(letters, vec![1, 0, 1, 0]);
    }

    #[test]
    fn derived_residual_of_variable_is_a_leaf() {
        let t: Term<char> = Term::var('x');
        assert_eq!(
            derived_residual(&negation(), &t, &0).unwrap(),
            Term::var(('x', 0))
        );
    }

    #[test]
    fn derived_residual_substitutes_branches() {
        let t = Term::app(Sym(0), vec![Term::var('x'), Term::var('y')]);
        let expected = Term::app(Sym(0), vec![Term::var(('y', 0)), Term::var(('x', 0))]);
        assert_eq!(derived_residual(&negation(), &t, &0).unwrap(), expected);
    }

    #[test]
    fn non_reading_state_keeps_environment() {
        let tr = ResidualTransducer::new(bits(), bits(), vec![vec![Term::var((1, 0))]]).unwrap();
        let env = alternator();
        let (i, _, rest) = tensor_observe(&tr, &0, &env, Sym(0)).unwrap();
        assert_eq!(i, 1);
        assert!(op_equiv(&rest, &env, 6).unwrap());
        assert!(!tr.reads_input());
    }

    #[test]
    fn rejects_bad_leaves() {
        let t = Term::var((2, 0));
        assert!(ResidualTransducer::new(bits(), bits(), vec![vec![t]]).is_err());
        let t = Term::var((0, 3));
        assert!(ResidualTransducer::new(bits(), bits(), vec![vec![t]]).is_err());
    }
}
