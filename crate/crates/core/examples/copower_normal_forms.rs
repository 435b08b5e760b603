//! Copower normal forms: collapsing subterms whose leaves share a label.

use comodels::bimodel::{is_copower_normal, normalize_copower};
use comodels::theory::{FreeModel, Signature, Sym, Term};

fn main() -> comodels::Result<()> {
    let sig = Signature::new([("op", 2)])?;
    let op = Sym(0);
    let leaf = |b: char, x: &'static str| Term::var((b, Term::var(x)));

    // op(op((p, x), (p, y)), (p, z)) collapses completely;
    // op((p, x), (q, y)) is already normal.
    let t = Term::app(
        op,
        vec![
            Term::app(op, vec![leaf('p', "x"), leaf('p', "y")]),
            leaf('p', "z"),
        ],
    );
    let mixed = Term::app(op, vec![leaf('p', "x"), leaf('q', "y")]);
    for term in [t, mixed] {
        let n = normalize_copower(&term, &FreeModel::default()).into_term();
        let (b, inner) = match &n {
            Term::Var((b, x)) => (Some(*b), Some(sig.display(x).to_string())),
            Term::App(..) => (None, None),
        };
        println!(
            "normal: {} leaf label {b:?} body {inner:?} ({} nodes)",
            is_copower_normal(&n),
            n.size()
        );
    }
    Ok(())
}
