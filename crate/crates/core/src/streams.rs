//! The one-symbol case: streams over an input alphabet, stream processors
//! given as finite-state trees, and their translation to transducers.

use std::sync::Arc;

use crate::comodel::{anamorphism, walk_to, FinalState, FiniteComodel, Lasso};
use crate::error::{Error, Result};
use crate::residual::ResidualTransducer;
use crate::theory::{Signature, Sym, Term};

/// The name of the single request symbol of a stream theory.
pub const READ: &str = "read";

/// The theory of `arity`-valued input: one symbol `read` of that arity.
pub fn stream_signature(arity: usize) -> Result<Signature> {
    Signature::new([(READ, arity)])
}

/// The stream whose letters unroll `letters`, as a state of the final
/// comodel over `stream_signature(arity)`.
pub fn stream_of(arity: usize, letters: &Lasso<usize>) -> Result<FinalState> {
    let sig = stream_signature(arity)?;
    let (p, c) = (letters.prefix().len(), letters.cycle().len());
    let table = (0..p + c)
        .map(|k| {
            let next = if k + 1 < p + c { k + 1 } else { p };
            vec![(*letters.get(k), next)]
        })
        .collect();
    anamorphism(&FiniteComodel::new(sig, table)?, 0)
}

/// The first `n` letters of a stream, or of any state over a one-symbol
/// signature.
pub fn stream_letters(s: &FinalState, n: usize) -> Result<Vec<usize>> {
    if s.signature().len() != 1 {
        return Err(Error::SignatureMismatch(
            "streams are states over a one-symbol signature".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    let mut cur = s.clone();
    for _ in 0..n {
        let (a, next) = cur.step(Sym(0));
        out.push(a);
        cur = next;
    }
    Ok(out)
}

/// A finite-state stream processor: each state reads input letters along a
/// finite tree until it reaches a leaf `(output letter, next state)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhpTree(Arc<GhpData>);

#[derive(Debug, PartialEq, Eq)]
struct GhpData {
    in_sig: Signature,
    alphabet: Vec<String>,
    states: Vec<Term<(usize, usize)>>,
}

impl GhpTree {
    /// Input letters are `0..input_arity`; output letters index
    /// `alphabet`.
    pub fn new(
        input_arity: usize,
        alphabet: Vec<String>,
        states: Vec<Term<(usize, usize)>>,
    ) -> Result<Self> {
        let in_sig = stream_signature(input_arity)?;
        if alphabet.is_empty() {
            return Err(Error::ZeroArity("output alphabet".into()));
        }
        if states.is_empty() {
            return Err(Error::InvalidState { state: 0, count: 0 });
        }
        let count = states.len();
        for t in &states {
            in_sig.check_term(t)?;
            for &(b, next) in t.vars() {
                if b >= alphabet.len() {
                    return Err(Error::IndexOutOfRange {
                        symbol: "output alphabet".into(),
                        index: b,
                        arity: alphabet.len(),
                    });
                }
                if next >= count {
                    return Err(Error::InvalidState { state: next, count });
                }
            }
        }
        Ok(GhpTree(Arc::new(GhpData {
            in_sig,
            alphabet,
            states,
        })))
    }

    pub fn input_signature(&self) -> &Signature {
        &self.0.in_sig
    }

    pub fn alphabet(&self) -> &[String] {
        &self.0.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.0.states.len()
    }

    pub fn term(&self, state: usize) -> Result<&Term<(usize, usize)>> {
        self.check_state(state)?;
        Ok(&self.0.states[state])
    }

    fn check_state(&self, state: usize) -> Result<()> {
        if state < self.state_count() {
            Ok(())
        } else {
            Err(Error::InvalidState {
                state,
                count: self.state_count(),
            })
        }
    }

    /// The output signature of [`GhpTree::to_transducer`].
    pub fn output_signature(&self) -> Signature {
        stream_signature(self.0.alphabet.len()).expect("alphabet is nonempty")
    }

    /// Runs one state against an input stream: returns the output letter,
    /// the next state and the input left over.
    pub fn step(&self, state: usize, input: &FinalState) -> Result<(usize, usize, FinalState)> {
        self.check_state(state)?;
        if input.signature() != &self.0.in_sig {
            return Err(Error::SignatureMismatch(
                "input is not a stream over the tree's input alphabet".into(),
            ));
        }
        let (&(b, next), rest) = walk_to(&self.0.states[state], input);
        Ok((b, next, rest))
    }

    /// The first `n` output letters, by iterating [`GhpTree::step`].
    pub fn run(&self, state: usize, input: &FinalState, n: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(n);
        let (mut q, mut s) = (state, input.clone());
        for _ in 0..n {
            let (b, next, rest) = self.step(q, &s)?;
            out.push(b);
            q = next;
            s = rest;
        }
        Ok(out)
    }

    /// The same processor as a transducer whose output theory is
    /// `alphabet`-valued input; states keep their numbers.
    pub fn to_transducer(&self) -> ResidualTransducer {
        let table = self.0.states.iter().map(|t| vec![t.clone()]).collect();
        ResidualTransducer::new(self.0.in_sig.clone(), self.output_signature(), table)
            .expect("a valid tree translates to a valid transducer")
    }
}

/// [`GhpTree::step`] as a free function.
pub fn ghp_step(
    tree: &GhpTree,
    state: usize,
    input: &FinalState,
) -> Result<(usize, usize, FinalState)> {
    tree.step(state, input)
}

/// [`GhpTree::to_transducer`] as a free function.
pub fn ghp_to_transducer(tree: &GhpTree) -> ResidualTransducer {
    tree.to_transducer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodel::op_equiv;
    use crate::residual::reflect_transducer;

    fn read<V>(children: Vec<Term<V>>) -> Term<V> {
        Term::app(Sym(0), children)
    }

    fn leaf(b: usize, q: usize) -> Term<(usize, usize)> {
        Term::var((b, q))
    }

    fn letters(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn unrolls_prefix_then_cycle() {
        let s = stream_of(2, &Lasso::new(vec![1], vec![0, 1]).unwrap()).unwrap();
        assert_eq!(stream_letters(&s, 6).unwrap(), vec![1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn non_reading_state_leaves_input_alone() {
        let t = GhpTree::new(2, letters(&["b"]), vec![leaf(0, 0)]).unwrap();
        let s = stream_of(2, &Lasso::new(vec![1, 1], vec![0]).unwrap()).unwrap();
        let (b, q, rest) = t.step(0, &s).unwrap();
        assert_eq!((b, q), (0, 0));
        assert!(op_equiv(&rest, &s, 6).unwrap());
    }

    #[test]
    fn intro_tree_consumes_one_or_two_letters() {
        // read a0: 0 gives (b1, t1); 1 reads a1 for (b2, t2) or (b3, t3)
        let t0 = read(vec![leaf(1, 1), read(vec![leaf(2, 2), leaf(3, 3)])]);
        let rest = vec![leaf(0, 0); 3];
        let states = std::iter::once(t0).chain(rest).collect();
        let t = GhpTree::new(2, letters(&["b0", "b1", "b2", "b3"]), states).unwrap();
        let zeros = stream_of(2, &Lasso::new(vec![], vec![0]).unwrap()).unwrap();
        assert_eq!(t.step(0, &zeros).unwrap().0, 1);
        let ones = stream_of(2, &Lasso::new(vec![], vec![1]).unwrap()).unwrap();
        let (b, q, _) = t.step(0, &ones).unwrap();
        assert_eq!((b, q), (3, 3));
    }

    #[test]
    fn transducer_agrees_with_stepping() {
        let swap = GhpTree::new(
            2,
            letters(&["a", "b"]),
            vec![read(vec![leaf(1, 0), leaf(0, 0)])],
        )
        .unwrap();
        let f = reflect_transducer(&swap.to_transducer(), 0).unwrap();
        let s = stream_of(2, &Lasso::new(vec![], vec![0, 1]).unwrap()).unwrap();
        let out = stream_letters(&f.apply(&s).unwrap(), 4).unwrap();
        assert_eq!(out, vec![1, 0, 1, 0]);
        assert_eq!(out, swap.run(0, &s, 4).unwrap());
    }

    #[test]
    fn rejects_letters_outside_alphabet() {
        assert!(matches!(
            GhpTree::new(2, letters(&["a"]), vec![leaf(1, 0)]),
            Err(Error::IndexOutOfRange { index: 1, .. })
        ));
    }
}
