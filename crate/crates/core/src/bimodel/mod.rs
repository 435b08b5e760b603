//! Functions between final comodels: the model structure given by
//! splitting, state surgery lifted to functions, copower normal forms, and
//! reification into residual comodels.

mod copower;
mod reify;
mod trace;

use std::fmt;
use std::sync::Arc;

pub use copower::{is_copower_normal, normalize_copower, CopowerNormalTerm};
pub use reify::{
    canonicalize, determining_tree, probe_states, reify, Reified, ReifiedComodel, ReifyBudget,
    DEFAULT_SEED,
};

use crate::comodel::{graft_unchecked, graft_word_unchecked, FinalState};
use crate::error::{Error, Result};
use crate::theory::{Model, Path, Signature, Sym, Term};

/// How a [`StraightFn`] was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Reflected,
    Split,
    Grafted,
    Reified,
    Opaque,
}

type Apply = dyn Fn(&FinalState) -> FinalState + Send + Sync;

/// A function from the final comodel of one theory to that of another.
///
/// Straightness is not checked on construction; [`reify`] certifies it up
/// to a budget.
#[derive(Clone)]
pub struct StraightFn {
    in_sig: Signature,
    out_sig: Signature,
    provenance: Provenance,
    apply: Arc<Apply>,
}

impl fmt::Debug for StraightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StraightFn")
            .field("in_sig", &self.in_sig)
            .field("out_sig", &self.out_sig)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl StraightFn {
    pub fn new(
        in_sig: Signature,
        out_sig: Signature,
        provenance: Provenance,
        apply: impl Fn(&FinalState) -> FinalState + Send + Sync + 'static,
    ) -> Self {
        StraightFn {
            in_sig,
            out_sig,
            provenance,
            apply: Arc::new(apply),
        }
    }

    /// A function with no structural guarantees.
    pub fn opaque(
        in_sig: Signature,
        out_sig: Signature,
        apply: impl Fn(&FinalState) -> FinalState + Send + Sync + 'static,
    ) -> Self {
        StraightFn::new(in_sig, out_sig, Provenance::Opaque, apply)
    }

    pub fn identity(sig: Signature) -> Self {
        StraightFn::new(sig.clone(), sig, Provenance::Opaque, FinalState::clone)
    }

    pub fn in_signature(&self) -> &Signature {
        &self.in_sig
    }

    pub fn out_signature(&self) -> &Signature {
        &self.out_sig
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Whether both values share the same underlying function object.
    pub fn ptr_eq(&self, other: &StraightFn) -> bool {
        Arc::ptr_eq(&self.apply, &other.apply)
    }

    pub fn apply(&self, s: &FinalState) -> Result<FinalState> {
        if s.signature() != &self.in_sig {
            return Err(Error::SignatureMismatch(
                "argument is not over the function's input signature".into(),
            ));
        }
        Ok(self.call(s))
    }

    pub(crate) fn call(&self, s: &FinalState) -> FinalState {
        (self.apply)(s)
    }

    fn same_type(&self, other: &StraightFn) -> bool {
        self.in_sig == other.in_sig && self.out_sig == other.out_sig
    }
}

/// Dispatches on the answer to `sym` and continues on the derivative:
/// `split(σ, fs)(s) = fs[o_σ s](∂_σ s)`.
pub fn split(sym: Sym, fs: Vec<StraightFn>) -> Result<StraightFn> {
    let first = fs.first().ok_or_else(|| Error::ArityMismatch {
        symbol: format!("#{}", sym.0),
        expected: 1,
        found: 0,
    })?;
    let arity = first.in_sig.arity(sym)?;
    if fs.len() != arity {
        return Err(Error::ArityMismatch {
            symbol: first.in_sig.name(sym),
            expected: arity,
            found: fs.len(),
        });
    }
    if !fs.iter().all(|f| f.same_type(first)) {
        return Err(Error::SignatureMismatch(
            "split components have different signatures".into(),
        ));
    }
    Ok(split_unchecked(sym, fs))
}

pub(crate) fn split_unchecked(sym: Sym, fs: Vec<StraightFn>) -> StraightFn {
    let (in_sig, out_sig) = (fs[0].in_sig.clone(), fs[0].out_sig.clone());
    StraightFn::new(in_sig, out_sig, Provenance::Split, move |s| {
        let (i, rest) = s.step(sym);
        fs[i].call(&rest)
    })
}

/// Precomposition with grafting: `f^{σ,i}(s) = f(^{σ,i}s)`.
pub fn f_graft(f: &StraightFn, sym: Sym, index: usize) -> Result<StraightFn> {
    f.in_sig.check_index(sym, index)?;
    let g = f.clone();
    Ok(StraightFn::new(
        f.in_sig.clone(),
        f.out_sig.clone(),
        Provenance::Grafted,
        move |s| g.call(&graft_unchecked(s, sym, index)),
    ))
}

/// Precomposition with grafting a whole path.
pub fn f_graft_word(f: &StraightFn, p: &Path) -> Result<StraightFn> {
    f.in_sig.check_path(p)?;
    let (g, p) = (f.clone(), p.clone());
    Ok(StraightFn::new(
        f.in_sig.clone(),
        f.out_sig.clone(),
        Provenance::Grafted,
        move |s| g.call(&graft_word_unchecked(s, &p)),
    ))
}

/// `[f, t]`: `f` itself at a variable, and `split_σ(λi.[f^{σ,i}, t_i])` at
/// `σ(λi.t_i)`.
pub fn wrap<V>(f: &StraightFn, t: &Term<V>) -> Result<StraightFn> {
    f.in_sig.check_term(t)?;
    Ok(wrap_unchecked(f, t))
}

fn wrap_unchecked<V>(f: &StraightFn, t: &Term<V>) -> StraightFn {
    match t {
        Term::Var(_) => f.clone(),
        Term::App(sym, children) => {
            let fs = children
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let fi = f_graft(f, *sym, i).expect("index below arity");
                    wrap_unchecked(&fi, c)
                })
                .collect();
            split_unchecked(*sym, fs)
        }
    }
}

/// Functions of fixed signatures as a model of the input theory, with
/// operations given by [`split`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SplitModel;

impl Model for SplitModel {
    type Carrier = StraightFn;

    fn operate(&self, sym: Sym, args: Vec<StraightFn>) -> StraightFn {
        split_unchecked(sym, args)
    }
}

/// The function whose first output is `o_σ₁(∂_σ₁ s) + o_σ₁(∂_σ₂ s)` mod 2,
/// where `σ₁, σ₂` are the first two input symbols; the output after any
/// word of length `n` is the same quantity computed at `∂_σ₁ⁿ s`.
///
/// Reading either summand forces a path that cannot reach the other, so no
/// residual state computes this function.
pub fn parallel_xor(in_sig: &Signature, out_sig: &Signature) -> Result<StraightFn> {
    if in_sig.len() < 2 {
        return Err(Error::SignatureMismatch(
            "parallel-xor needs at least two input symbols".into(),
        ));
    }
    for tau in out_sig.symbols() {
        out_sig.check_index(tau, 1)?;
    }
    let (s1, s2) = (Sym(0), Sym(1));
    let out = out_sig.clone();
    Ok(StraightFn::opaque(
        in_sig.clone(),
        out_sig.clone(),
        move |s| {
            let s = s.clone();
            let width = out.len();
            FinalState::from_word_fn(out.clone(), move |w| {
                let mut cur = s.clone();
                for _ in 0..w.len() {
                    cur = cur.step(s1).1;
                }
                let a = cur.step(s1).1.step(s1).0;
                let b = cur.step(s2).1.step(s1).0;
                vec![(a + b) % 2; width]
            })
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodel::{anamorphism, graft, op_equiv, FiniteComodel};
    use crate::residual::{reflect_transducer, ResidualTransducer};

    fn bits() -> Signature {
        Signature::new([("read", 2)]).unwrap()
    }

    fn stream(table: Vec<Vec<(usize, usize)>>) -> FinalState {
        anamorphism(&FiniteComodel::new(bits(), table).unwrap(), 0).unwrap()
    }

    fn negation() -> StraightFn {
        let t = Term::app(Sym(0), vec![Term::var((1, 0)), Term::var((0, 0))]);
        let tr = ResidualTransducer::new(bits(), bits(), vec![vec![t]]).unwrap();
        reflect_transducer(&tr, 0).unwrap()
    }

    #[test]
    fn wrap_at_variable_is_the_same_object() {
        let f = negation();
        let g = wrap(&f, &Term::var(())).unwrap();
        assert!(f.ptr_eq(&g));
    }

    #[test]
    fn split_dispatches_on_the_grafted_answer() {
        let f = negation();
        let id = StraightFn::identity(bits());
        let h = split(Sym(0), vec![f.clone(), id.clone()]).unwrap();
        let s = stream(vec![vec![(0, 1)], vec![(1, 0)]]);
        let g = graft(&s, Sym(0), 1).unwrap();
        assert!(op_equiv(&h.apply(&g).unwrap(), &s, 6).unwrap());
        let g = graft(&s, Sym(0), 0).unwrap();
        assert!(op_equiv(&h.apply(&g).unwrap(), &f.apply(&s).unwrap(), 6).unwrap());
    }

    #[test]
    fn split_checks_arity() {
        let f = negation();
        assert!(matches!(
            split(Sym(0), vec![f]),
            Err(Error::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn wrap_of_reading_term_agrees_with_negation() {
        let f = negation();
        let t = Term::app(Sym(0), vec![Term::var(0), Term::var(1)]);
        let g = wrap(&f, &t).unwrap();
        let s = stream(vec![vec![(1, 1)], vec![(0, 2)], vec![(0, 0)]]);
        assert!(op_equiv(&g.apply(&s).unwrap(), &f.apply(&s).unwrap(), 8).unwrap());
    }

    #[test]
    fn parallel_xor_first_output() {
        let sig = Signature::new([("l", 2), ("r", 2)]).unwrap();
        let out = bits();
        let h = parallel_xor(&sig, &out).unwrap();
        // ∂_l s answers 1 to l, ∂_r s answers 0 to l
        let m = FiniteComodel::new(
            sig.clone(),
            vec![
                vec![(0, 1), (0, 2)],
                vec![(1, 1), (0, 1)],
                vec![(0, 2), (0, 2)],
            ],
        )
        .unwrap();
        let s = anamorphism(&m, 0).unwrap();
        assert_eq!(h.apply(&s).unwrap().head(), vec![1]);
    }
}
