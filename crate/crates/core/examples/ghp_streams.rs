//! Stream processors as trees: running them and presenting them as
//! transducers, including two presentations of one constant map.

use comodels::bimodel::{canonicalize, ReifyBudget};
use comodels::comodel::Lasso;
use comodels::residual::residual_bisimilar;
use comodels::streams::{stream_of, GhpTree};
use comodels::theory::{Sym, Term};

fn main() -> comodels::Result<()> {
    let ab = vec!["a".to_string(), "b".to_string()];
    let read = Sym(0);
    let swap = GhpTree::new(
        2,
        ab.clone(),
        vec![Term::app(read, vec![Term::var((1, 0)), Term::var((0, 0))])],
    )?;
    let input = stream_of(2, &Lasso::new(vec![1], vec![0, 0, 1])?)?;
    let out: Vec<_> = swap
        .run(0, &input, 8)?
        .into_iter()
        .map(|b| ab[b].as_str())
        .collect();
    println!("swap: {}", out.join(""));

    let branching = GhpTree::new(
        2,
        ab.clone(),
        vec![Term::app(read, vec![Term::var((0, 0)), Term::var((0, 0))])],
    )?;
    let silent = GhpTree::new(2, ab, vec![Term::var((0, 0))])?;
    let budget = ReifyBudget::default();
    let cb = canonicalize(&branching.to_transducer(), 0, &budget)?.to_transducer()?;
    let cs = canonicalize(&silent.to_transducer(), 0, &budget)?.to_transducer()?;
    println!(
        "canonical forms reads input: {} {}",
        cb.reads_input(),
        cs.reads_input()
    );
    println!("bisimilar: {}", residual_bisimilar(&cb, &0, &cs, &0, 8)?);
    Ok(())
}
