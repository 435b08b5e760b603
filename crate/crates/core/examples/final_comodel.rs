//! Finite machines, their images in the final comodel, and bounded
//! operational equivalence.

use comodels::comodel::{anamorphism, derived_coop, op_equiv, path_along, FiniteComodel};
use comodels::theory::{Signature, Term};

fn main() -> comodels::Result<()> {
    let sig = Signature::new([("a", 2), ("b", 2)])?;
    let (a, b) = (sig.lookup("a").unwrap(), sig.lookup("b").unwrap());

    // Two machines with the same behavior: the second has a redundant state.
    let m1 = FiniteComodel::new(sig.clone(), vec![vec![(1, 0), (0, 0)]])?;
    let m2 = FiniteComodel::new(
        sig.clone(),
        vec![vec![(1, 1), (0, 0)], vec![(1, 0), (0, 1)]],
    )?;
    let (s1, s2) = (anamorphism(&m1, 0)?, anamorphism(&m2, 0)?);
    println!("equivalent to depth 8: {}", op_equiv(&s1, &s2, 8)?);
    println!(
        "bisimulation classes of m2: {:?}",
        m2.bisimulation_classes()
    );

    // Running a term against a state: follow the observed branch to a leaf.
    let t = Term::app(
        a,
        vec![
            Term::var("left"),
            Term::app(b, vec![Term::var("bl"), Term::var("br")]),
        ],
    );
    let (v, rest) = derived_coop(&t, &s1)?;
    println!(
        "{} returns {v} along {}",
        sig.display(&t),
        sig.display_path(&path_along(&t, &s1)?)
    );
    println!("remaining state answers {:?}", rest.head());
    Ok(())
}
