//! Laws of the final comodel: observation, anamorphisms, derived
//! co-operations, grafting and bounded equivalence.

use comodels::comodel::{
    anamorphism, derived_coop, graft, graft_word, op_equiv, path_along, FinalState,
};
use comodels::sample::{self, SampleRng};
use comodels::theory::{Signature, Sym, Term};
use proptest::prelude::*;
use rand::Rng;

fn sig() -> Signature {
    Signature::new([("a", 2), ("b", 3)]).unwrap()
}

fn state(rng: &mut SampleRng) -> FinalState {
    sample::random_state(&sig(), 4, rng)
}

fn sym(rng: &mut SampleRng) -> Sym {
    Sym(rng.random_range(0..2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn observation_reads_the_behavior(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let (s, sigma) = (state(&mut rng), sym(&mut rng));
        let (i, next) = s.observe(sigma).unwrap();
        prop_assert_eq!(i, s.behavior(&[]).unwrap()[sigma.0]);
        for w in sig().words(5) {
            let mut longer = vec![sigma];
            longer.extend(&w);
            prop_assert_eq!(next.behavior(&w).unwrap(), s.behavior(&longer).unwrap());
        }
    }

    #[test]
    fn quotient_states_have_the_same_image(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let m = sample::random_comodel(&sig(), 5, &mut rng);
        let (q, classes) = m.quotient();
        for (state, &class) in classes.iter().enumerate() {
            let a = anamorphism(&m, state).unwrap();
            let b = anamorphism(&q, class).unwrap();
            prop_assert!(op_equiv(&a, &b, 8).unwrap());
        }
    }

    #[test]
    fn derived_coop_consumes_the_path(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let s = state(&mut rng);
        let t = sample::random_term(&sig(), 4, &mut rng, &mut |r| r.random_range(0..3u8));
        let (v, rest) = derived_coop(&t, &s).unwrap();
        let p = path_along(&t, &s).unwrap();
        prop_assert_eq!(t.at_path(&p), Some(&Term::Var(*v)));
        prop_assert!(op_equiv(&rest, &s.after(&p.word()).unwrap(), 6).unwrap());
    }

    #[test]
    fn graft_word_matches_nested_grafts(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let s = state(&mut rng);
        let p = sample::random_path(&sig(), 3, &mut rng);
        let g = graft_word(&s, &p).unwrap();
        for w in sig().words(4) {
            prop_assert_eq!(g.behavior(&w).unwrap(), nested_graft_behavior(&s, &p.0, &w));
        }
    }

    #[test]
    fn graft_answers_then_continues_as_base(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let s = state(&mut rng);
        let sigma = sym(&mut rng);
        let i = rng.random_range(0..sig().arity(sigma).unwrap());
        let g = graft(&s, sigma, i).unwrap();
        prop_assert_eq!(g.output(sigma).unwrap(), i);
        prop_assert!(op_equiv(&g.derivative(sigma).unwrap(), &s, 6).unwrap());
        let other = Sym(1 - sigma.0);
        prop_assert!(op_equiv(&g.derivative(other).unwrap(), &s.derivative(other).unwrap(), 6).unwrap());
    }

    #[test]
    fn bounded_equivalence_is_an_equivalence(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        // Small machines so that equivalent pairs occur.
        let xs: Vec<_> = (0..3).map(|_| sample::random_state(&sig(), 2, &mut rng)).collect();
        for d in 0..5 {
            for a in &xs {
                prop_assert!(op_equiv(a, a, d).unwrap());
                for b in &xs {
                    let ab = op_equiv(a, b, d).unwrap();
                    prop_assert_eq!(ab, op_equiv(b, a, d).unwrap());
                    if op_equiv(a, b, d + 1).unwrap() {
                        prop_assert!(ab);
                    }
                    for c in &xs {
                        if ab && op_equiv(b, c, d).unwrap() {
                            prop_assert!(op_equiv(a, c, d).unwrap());
                        }
                    }
                }
            }
        }
    }
}

/// The answers after `w` of `s` with the grafts `p` applied outermost
/// first: the head graft overrides its own symbol at the root and skips
/// itself on that symbol; every other observation goes to the inner graft.
fn nested_graft_behavior(s: &FinalState, p: &[(Sym, usize)], w: &[Sym]) -> Vec<usize> {
    let Some((&(sigma, i), inner)) = p.split_first() else {
        return s.behavior(w).unwrap();
    };
    match w.split_first() {
        None => {
            let mut tuple = nested_graft_behavior(s, inner, &[]);
            tuple[sigma.0] = i;
            tuple
        }
        Some((&first, rest)) if first == sigma => nested_graft_behavior(s, inner, rest),
        Some(_) => nested_graft_behavior(s, inner, w),
    }
}
