//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.

mod common;

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use comodels::bimodel::{
    canonicalize, determining_tree, f_graft, is_copower_normal, normalize_copower, parallel_xor,
    reify, wrap, ReifyBudget,
};
use comodels::comodel::{
    derived_coop, graft, graft_inf, in_subbasis, op_equiv, path_along, FinalState,
};
use comodels::residual::{reflect_transducer, residual_bisimilar};
use comodels::sample::{self, SampleRng};
use comodels::streams::GhpTree;
use comodels::theory::{FreeModel, Path, Signature, Sym, Term};
use comodels::Error;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Observation depth for comparing functions and states.
const PROBE: usize = 8;
/// Observation depth for residual states and grafted spines.
const RESIDUAL_PROBE: usize = 6;

fn bits() -> Signature {
    Signature::new([("read", 2)]).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Input and output signatures with one or two binary symbols each.
fn random_signatures(rng: &mut SampleRng) -> (Signature, Signature) {
    let ni = rng.random_range(1..=2);
    let no = rng.random_range(1..=2);
    let ins = Signature::new([("a", 2), ("b", 2)].into_iter().take(ni)).unwrap();
    let outs = Signature::new([("x", 2), ("y", 2)].into_iter().take(no)).unwrap();
    (ins, outs)
}

/// Whether two functions agree on `s` to depth `PROBE`; a panic while
/// observing counts as disagreement.
fn agree_on(
    f: &comodels::bimodel::StraightFn,
    g: &comodels::bimodel::StraightFn,
    s: &FinalState,
) -> bool {
    catch_unwind(AssertUnwindSafe(|| {
        op_equiv(&f.apply(s).unwrap(), &g.apply(s).unwrap(), PROBE).unwrap()
    }))
    .unwrap_or(false)
}

fn round_trip() -> Outcome {
    // Canonical forms of transducers that read without consuming grow deeper
    // with every output, so the tree budget is pinned well above the step
    // depth of the generated transducers.
    let mut budget = ReifyBudget::default()
        .with_tree_depth(18)
        .with_probe_depth(4)
        .with_max_states(8)
        .with_seed(comodels::bimodel::DEFAULT_SEED);
    budget.max_trace_len = 20;
    let mut rng = sample::rng(1);
    let mut failures = Vec::new();
    for k in 0..100 {
        let (ins, outs) = random_signatures(&mut rng);
        let tr = sample::random_transducer(&ins, &outs, 3, 2, &mut rng);
        let f = reflect_transducer(&tr, 0).unwrap();
        let envs: Vec<_> = (0..20)
            .map(|_| sample::random_state(&ins, 4, &mut rng))
            .collect();
        match reify(&f, &budget) {
            Err(e) => failures.push(format!("case {k}: {e}")),
            Ok(r) => {
                let g = r.reflect();
                let bad = envs.iter().filter(|s| !agree_on(&f, &g, s)).count();
                if bad > 0 {
                    failures.push(format!("case {k}: {bad} of 20 environments differ"));
                }
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok("100 transducers, 20 environments each, depth 8".into())
}

fn constant_collapse() -> Outcome {
    let a = "a".to_string();
    let b = "b".to_string();
    let branching = GhpTree::new(
        2,
        vec![a.clone(), b.clone()],
        vec![Term::app(
            Sym(0),
            vec![Term::var((0, 0)), Term::var((0, 0))],
        )],
    )
    .unwrap();
    let silent = GhpTree::new(2, vec![a, b], vec![Term::var((0, 0))]).unwrap();
    let (tb, ts) = (branching.to_transducer(), silent.to_transducer());
    ensure(tb != ts, || "presentations should differ".into())?;
    let (fb, fs) = (
        reflect_transducer(&tb, 0).unwrap(),
        reflect_transducer(&ts, 0).unwrap(),
    );
    let mut rng = sample::rng(2);
    for k in 0..20 {
        let s = sample::random_state(&bits(), 6, &mut rng);
        ensure(agree_on(&fb, &fs, &s), || {
            format!("functions differ on environment {k}")
        })?;
    }
    let budget = ReifyBudget::default();
    let cb = canonicalize(&tb, 0, &budget).map_err(|e| e.to_string())?;
    let cs = canonicalize(&ts, 0, &budget).map_err(|e| e.to_string())?;
    let (cb, cs) = (cb.to_transducer().unwrap(), cs.to_transducer().unwrap());
    ensure(residual_bisimilar(&cb, &0, &cs, &0, PROBE).unwrap(), || {
        "canonical forms are not bisimilar".into()
    })?;
    for q in 0..cb.state_count() {
        let t = cb.term(q, Sym(0)).unwrap();
        ensure(t.is_var(), || {
            format!("canonical state {q} reads input: {t:?}")
        })?;
    }
    ensure(!cb.reads_input(), || "canonical form reads input".into())?;
    Ok(format!("{} canonical state(s), no reads", cb.state_count()))
}

type Leaf = (u8, Term<u8>);

/// Every term of depth at most `d` over one binary symbol with leaves
/// `(b, x)`, `b, x ∈ {0, 1}`.
fn all_terms(d: usize) -> Vec<Term<Leaf>> {
    let leaves: Vec<Term<Leaf>> = (0..2)
        .flat_map(|b| (0..2).map(move |x| Term::var((b, Term::var(x)))))
        .collect();
    if d == 0 {
        return leaves;
    }
    let smaller = all_terms(d - 1);
    let mut out = leaves;
    for l in &smaller {
        for r in &smaller {
            out.push(Term::app(Sym(0), vec![l.clone(), r.clone()]));
        }
    }
    out
}

/// The terms obtained by one rewrite `σ((b, x₀), (b, x₁)) → (b, σ(x₀, x₁))`
/// at any position.
fn one_step(t: &Term<Leaf>) -> Vec<Term<Leaf>> {
    let Term::App(s, cs) = t else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if let [Term::Var((b0, x0)), Term::Var((b1, x1))] = cs.as_slice() {
        if b0 == b1 {
            out.push(Term::var((
                *b0,
                Term::app(*s, vec![x0.clone(), x1.clone()]),
            )));
        }
    }
    for (k, c) in cs.iter().enumerate() {
        for c2 in one_step(c) {
            let mut cs2 = cs.clone();
            cs2[k] = c2;
            out.push(Term::App(*s, cs2));
        }
    }
    out
}

/// Every normal form reachable by some order of rewrites.
fn reachable_normal_forms(
    t: &Term<Leaf>,
    memo: &mut HashMap<Term<Leaf>, HashSet<Term<Leaf>>>,
) -> HashSet<Term<Leaf>> {
    if let Some(r) = memo.get(t) {
        return r.clone();
    }
    let next = one_step(t);
    let result = if next.is_empty() {
        HashSet::from([t.clone()])
    } else {
        let mut acc = HashSet::new();
        for n in &next {
            acc.extend(reachable_normal_forms(n, memo));
        }
        acc
    };
    memo.insert(t.clone(), result.clone());
    result
}

fn has_banned_shape(t: &Term<Leaf>) -> bool {
    match t {
        Term::Var(_) => false,
        Term::App(_, cs) => {
            matches!(cs.as_slice(), [Term::Var((b0, _)), Term::Var((b1, _))] if b0 == b1)
                || cs.iter().any(has_banned_shape)
        }
    }
}

fn copower_normalization() -> Outcome {
    // Counts from the recurrence N(0) = 4, N(d) = 4 + N(d-1)^2.
    let expected_count = (0..3).fold(4u64, |n, _| 4 + n * n);
    let terms = all_terms(3);
    ensure(terms.len() as u64 == expected_count, || {
        format!(
            "enumerated {} terms, expected {expected_count}",
            terms.len()
        )
    })?;
    let mut memo = HashMap::new();
    let mut expected = Vec::with_capacity(terms.len());
    for t in &terms {
        let forms = reachable_normal_forms(t, &mut memo);
        ensure(forms.len() == 1, || {
            format!("{} distinct normal forms for {t:?}", forms.len())
        })?;
        expected.push(forms.into_iter().next().unwrap());
    }
    let model = FreeModel::<u8>::default();
    for (t, want) in terms.iter().zip(&expected) {
        let got = normalize_copower(t, &model).into_term();
        ensure(&got == want, || {
            format!("{t:?} normalized to {got:?}, expected {want:?}")
        })?;
        ensure(!has_banned_shape(&got) && is_copower_normal(&got), || {
            format!("normal form {got:?} has a banned subterm")
        })?;
    }
    Ok(format!("{} terms, unique normal forms", terms.len()))
}

fn decision_tree_unfolding() -> Outcome {
    let budget = ReifyBudget::default();
    let mut rng = sample::rng(4);
    // The unfolding recovers the whole output only when the output
    // signature has one symbol, so that the first output splits the output
    // space as a copower.
    let outs = Signature::new([("x", 2)]).unwrap();
    for k in 0..50 {
        let (ins, _) = random_signatures(&mut rng);
        let tr = sample::random_transducer(&ins, &outs, 3, 2, &mut rng);
        let f = reflect_transducer(&tr, 0).unwrap();
        let t = determining_tree(&f, Sym(0), &budget).map_err(|e| format!("case {k}: {e}"))?;
        let g = wrap(&f, &t).unwrap();
        for e in 0..20 {
            let s = sample::random_state(&ins, 4, &mut rng);
            ensure(agree_on(&f, &g, &s), || {
                format!("case {k}: differs on environment {e}")
            })?;
        }
    }
    Ok("50 functions, 20 environments each".into())
}

fn grafted_spines() -> Outcome {
    let sig = Signature::new([("a", 2), ("b", 3)]).unwrap();
    let mut rng = sample::rng(5);
    for k in 0..50 {
        let s = sample::random_state(&sig, 4, &mut rng);
        let seq = sample::random_pair_seq(&sig, 4, &mut rng);
        let g = graft_inf(&s, &seq).unwrap();
        let mut cur = g.clone();
        for j in 1..=8 {
            let &(tau, i) = seq.get(j - 1);
            ensure(cur.output(tau).unwrap() == i, || {
                format!("case {k}: answer {j} is not {i}")
            })?;
            cur = cur.derivative(tau).unwrap();
            let shifted = graft_inf(&s, &seq.shift(j)).unwrap();
            ensure(op_equiv(&cur, &shifted, RESIDUAL_PROBE).unwrap(), || {
                format!("case {k}: derivative {j} differs from the shifted spine")
            })?;
        }
    }
    Ok("50 spines, 8 steps each".into())
}

/// Number of decision trees of depth at most `d` whose every cell fixes
/// `a` after `a` and `a` after `b` together, the two observations the
/// parallel XOR reads. A cell fixes an observation when the path to it
/// asks that symbol after that word.
fn determining_xor_trees(
    word: &mut Vec<Sym>,
    fixed: &mut Vec<(Vec<Sym>, Sym)>,
    d: usize,
) -> (u64, u64) {
    let (a, b) = (Sym(0), Sym(1));
    let need = [(vec![a], a), (vec![b], a)];
    let leaf_ok = need.iter().all(|c| fixed.contains(c));
    let (mut all, mut good) = (1u64, leaf_ok as u64);
    if d > 0 {
        for sym in [a, b] {
            let (mut all_s, mut good_s) = (1u64, 1u64);
            for _ in 0..2 {
                fixed.push((word.clone(), sym));
                word.push(sym);
                let (x, y) = determining_xor_trees(word, fixed, d - 1);
                word.pop();
                fixed.pop();
                all_s *= x;
                good_s *= y;
            }
            all += all_s;
            good += good_s;
        }
    }
    (all, good)
}

fn xor_oracle(s: &FinalState) -> usize {
    let (a, b) = (Sym(0), Sym(1));
    let x = s.derivative(a).unwrap().output(a).unwrap();
    let y = s.derivative(b).unwrap().output(a).unwrap();
    (x + y) % 2
}

fn non_straight_detection() -> Outcome {
    let pair = Signature::new([("a", 2), ("b", 2)]).unwrap();
    let bit = Signature::new([("x", 2)]).unwrap();
    let f = parallel_xor(&pair, &bit).unwrap();
    let mut rng = sample::rng(6);
    for _ in 0..32 {
        let s = sample::random_state(&pair, 4, &mut rng);
        let y = f.apply(&s).unwrap();
        ensure(y.output(Sym(0)).unwrap() == xor_oracle(&s), || {
            "harness disagrees with its definition".into()
        })?;
    }
    let mut totals = Vec::new();
    for d in 0..=4 {
        let (all, good) = determining_xor_trees(&mut Vec::new(), &mut Vec::new(), d);
        ensure(good == 0, || {
            format!("oracle found {good} determining trees of depth {d}")
        })?;
        totals.push(all);
        match reify(&f, &ReifyBudget::default().with_tree_depth(d)) {
            Err(Error::NotStraightWithinBudget(_)) => {}
            Err(e) => return Err(format!("depth {d}: unexpected error {e}")),
            Ok(_) => return Err(format!("depth {d}: reify accepted the function")),
        }
    }
    // T(0) = 1, T(d) = 1 + 2 T(d-1)^2.
    let expected: Vec<u64> = (0..=4)
        .scan(0u64, |t, d| {
            *t = if d == 0 { 1 } else { 1 + 2 * *t * *t };
            Some(*t)
        })
        .collect();
    ensure(totals == expected, || {
        format!("tree counts {totals:?}, expected {expected:?}")
    })?;
    Ok(format!(
        "rejected at depths 0..=4, {} trees checked at depth 4",
        totals[4]
    ))
}

fn walk_oracle<V>(t: &Term<V>, s: &FinalState) -> (Path, FinalState) {
    let (mut t, mut s, mut p) = (t, s.clone(), Path::empty());
    while let Term::App(sym, cs) = t {
        let (i, next) = s.observe(*sym).unwrap();
        p = p.child(*sym, i);
        t = &cs[i];
        s = next;
    }
    (p, s)
}

fn derived_coop_oracle() -> Outcome {
    let sig = Signature::new([("a", 2), ("b", 3), ("c", 1)]).unwrap();
    let mut rng = sample::rng(7);
    for k in 0..200 {
        let t = sample::random_term(&sig, 4, &mut rng, &mut |r| r.random_range(0..5u8));
        let s = sample::random_state(&sig, 5, &mut rng);
        let (v, rest) = derived_coop(&t, &s).unwrap();
        let p = path_along(&t, &s).unwrap();
        let (oracle_path, oracle_rest) = walk_oracle(&t, &s);
        ensure(p == oracle_path, || format!("case {k}: path differs"))?;
        ensure(t.at_path(&p) == Some(&Term::Var(*v)), || {
            format!("case {k}: variable is not the leaf on the path")
        })?;
        let after = s.after(&p.word()).unwrap();
        ensure(op_equiv(&rest, &after, RESIDUAL_PROBE).unwrap(), || {
            format!("case {k}: residual differs from the iterated derivative")
        })?;
        ensure(
            op_equiv(&rest, &oracle_rest, RESIDUAL_PROBE).unwrap(),
            || format!("case {k}: residual differs from the walk"),
        )?;
    }
    Ok("200 term and state pairs".into())
}

fn subbasis_preimage() -> Outcome {
    let mut rng = sample::rng(8);
    for k in 0..100 {
        let (ins, outs) = random_signatures(&mut rng);
        let tr = sample::random_transducer(&ins, &outs, 3, 2, &mut rng);
        let f = reflect_transducer(&tr, 0).unwrap();
        let s = sample::random_state(&ins, 4, &mut rng);
        let sigma = Sym(rng.random_range(0..ins.len()));
        let i = rng.random_range(0..2);
        let mut var = |r: &mut SampleRng| r.random_range(0..3u8);

        // Input side: a term headed by the grafted symbol runs its i-th
        // branch on the base state.
        let branches: Vec<_> = (0..2)
            .map(|_| sample::random_term(&ins, 3, &mut rng, &mut var))
            .collect();
        let whole = Term::app(sigma, branches.clone());
        let grafted = graft(&s, sigma, i).unwrap();
        for v in 0..3u8 {
            let lhs = in_subbasis(&grafted, &whole, &v).unwrap();
            let rhs = in_subbasis(&s, &branches[i], &v).unwrap();
            ensure(lhs == rhs, || {
                format!("case {k}: input membership differs for {v}")
            })?;
        }

        // Output side: preimages under f of grafted outputs.
        let fg = f_graft(&f, sigma, i).unwrap();
        let y = fg.apply(&s).unwrap();
        let y_direct = f.apply(&grafted).unwrap();
        let tau = Sym(rng.random_range(0..outs.len()));
        let j = rng.random_range(0..2);
        let out_branches: Vec<_> = (0..2)
            .map(|_| sample::random_term(&outs, 3, &mut rng, &mut var))
            .collect();
        let out_whole = Term::app(tau, out_branches.clone());
        let y_grafted = graft(&y, tau, j).unwrap();
        for v in 0..3u8 {
            let transported = in_subbasis(&y, &out_branches[j], &v).unwrap();
            ensure(
                in_subbasis(&y_direct, &out_branches[j], &v).unwrap() == transported,
                || format!("case {k}: f_graft membership differs for {v}"),
            )?;
            ensure(
                in_subbasis(&y_grafted, &out_whole, &v).unwrap() == transported,
                || format!("case {k}: output membership differs for {v}"),
            )?;
        }
    }
    Ok("100 instances".into())
}

fn cli_determinism() -> Outcome {
    let first = common::run_golden_suite();
    let second = common::run_golden_suite();
    ensure(first == second, || "two runs differ".into())?;
    let bad = common::check_golden(&first);
    ensure(bad.is_empty(), || {
        format!("differs from golden files: {bad:?}")
    })?;
    Ok(format!("{} invocations, identical twice", first.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("round-trip identity", round_trip),
        ("constant presentations collapse", constant_collapse),
        ("copower normalization", copower_normalization),
        ("decision tree unfolding", decision_tree_unfolding),
        ("grafted spine laws", grafted_spines),
        ("non-straight detection", non_straight_detection),
        ("derived co-operation oracle", derived_coop_oracle),
        ("sub-basis preimage law", subbasis_preimage),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
