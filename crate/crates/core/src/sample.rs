//! Seeded random generation of machines, states, terms and transducers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comodel::{anamorphism, Behavior, FinalState, FiniteComodel, InfinitePairSeq, Lasso};
use crate::residual::ResidualTransducer;
use crate::theory::{Signature, Sym, Term};

/// The generator used throughout the crate.
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random finite comodel with between 1 and `max_states` states.
pub fn random_comodel(sig: &Signature, max_states: usize, rng: &mut SampleRng) -> FiniteComodel {
    let n = rng.random_range(1..=max_states.max(1));
    let table = (0..n)
        .map(|_| {
            sig.symbols()
                .map(|s| {
                    let out = rng.random_range(0..sig.arity_unchecked(s));
                    (out, rng.random_range(0..n))
                })
                .collect()
        })
        .collect();
    FiniteComodel::new(sig.clone(), table).expect("generated machine is well formed")
}

/// A random regular state: the initial state of a random machine with at
/// most `max_states` states.
pub fn random_state(sig: &Signature, max_states: usize, rng: &mut SampleRng) -> FinalState {
    let m = random_comodel(sig, max_states, rng);
    anamorphism(&m, 0).expect("state 0 exists")
}

struct Generic {
    sig: Signature,
    key: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Behavior for Generic {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        let key = mix(self.key ^ mix(sym.0 as u64 + 1));
        let out = (key % self.sig.arity_unchecked(sym) as u64) as usize;
        let next = Generic {
            sig: self.sig.clone(),
            key,
        };
        (out, FinalState::new(self.sig.clone(), next))
    }
}

/// A non-regular state whose answers are pseudo-random functions of the
/// word observed so far.
///
/// Distinct seeds give behaviors that differ almost everywhere, and no
/// nontrivial shift of such a behavior agrees with another on long words.
pub fn generic_state(sig: &Signature, seed: u64) -> FinalState {
    FinalState::new(
        sig.clone(),
        Generic {
            sig: sig.clone(),
            key: mix(seed),
        },
    )
}

/// A random term of depth at most `depth`. Inner nodes are chosen with
/// probability 2/3 while depth remains.
pub fn random_term<V>(
    sig: &Signature,
    depth: usize,
    rng: &mut SampleRng,
    leaf: &mut impl FnMut(&mut SampleRng) -> V,
) -> Term<V> {
    if depth == 0 || rng.random_range(0..3) == 0 {
        return Term::Var(leaf(rng));
    }
    let s = Sym(rng.random_range(0..sig.len()));
    let children = (0..sig.arity_unchecked(s))
        .map(|_| random_term(sig, depth - 1, rng, leaf))
        .collect();
    Term::App(s, children)
}

/// A random transducer with between 1 and `max_states` states and step
/// terms of depth at most `depth`.
pub fn random_transducer(
    in_sig: &Signature,
    out_sig: &Signature,
    max_states: usize,
    depth: usize,
    rng: &mut SampleRng,
) -> ResidualTransducer {
    let n = rng.random_range(1..=max_states.max(1));
    let table = (0..n)
        .map(|_| {
            out_sig
                .symbols()
                .map(|tau| {
                    let arity = out_sig.arity_unchecked(tau);
                    random_term(in_sig, depth, rng, &mut |r| {
                        (r.random_range(0..arity), r.random_range(0..n))
                    })
                })
                .collect()
        })
        .collect();
    ResidualTransducer::new(in_sig.clone(), out_sig.clone(), table)
        .expect("generated transducer is well formed")
}

/// A random lasso of (symbol, answer) pairs with prefix and cycle lengths
/// up to `max_len` (the cycle has at least one element).
pub fn random_pair_seq(sig: &Signature, max_len: usize, rng: &mut SampleRng) -> InfinitePairSeq {
    let pair = |r: &mut SampleRng| {
        let s = Sym(r.random_range(0..sig.len()));
        (s, r.random_range(0..sig.arity_unchecked(s)))
    };
    let p = rng.random_range(0..=max_len);
    let c = rng.random_range(1..=max_len.max(1));
    let prefix = (0..p).map(|_| pair(rng)).collect();
    let cycle = (0..c).map(|_| pair(rng)).collect();
    Lasso::new(prefix, cycle).expect("cycle is nonempty")
}

/// A random path of length at most `max_len`.
pub fn random_path(sig: &Signature, max_len: usize, rng: &mut SampleRng) -> crate::theory::Path {
    let n = rng.random_range(0..=max_len);
    crate::theory::Path(
        (0..n)
            .map(|_| {
                let s = Sym(rng.random_range(0..sig.len()));
                (s, rng.random_range(0..sig.arity_unchecked(s)))
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_reproducible() {
        let sig = Signature::new([("l", 2), ("r", 3)]).unwrap();
        let a = random_transducer(&sig, &sig, 3, 2, &mut rng(7));
        let b = random_transducer(&sig, &sig, 3, 2, &mut rng(7));
        assert_eq!(a, b);
    }

    #[test]
    fn terms_respect_depth() {
        let sig = Signature::new([("read", 2)]).unwrap();
        let mut r = rng(1);
        for _ in 0..100 {
            let t = random_term(&sig, 3, &mut r, &mut |r| r.random_range(0..4u8));
            assert!(t.depth() <= 3);
            sig.check_term(&t).unwrap();
        }
    }
}
