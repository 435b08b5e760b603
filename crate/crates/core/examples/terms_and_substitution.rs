//! Terms over a signature, substitution and evaluation in a model.

use comodels::theory::{eval_in_model, substitute, FnModel, Signature, Term};

fn main() -> comodels::Result<()> {
    let sig = Signature::new([("read", 2), ("flip", 1)])?;
    let read = sig.lookup("read").expect("declared");
    let flip = sig.lookup("flip").expect("declared");

    // read(x, flip(y))
    let t = Term::app(
        read,
        vec![Term::var("x"), Term::app(flip, vec![Term::var("y")])],
    );
    println!("t        = {}", sig.display(&t));

    let s = substitute(&t, |v| match *v {
        "x" => Some(Term::var("z")),
        "y" => Some(Term::app(read, vec![Term::var("z"), Term::var("z")])),
        _ => None,
    })?;
    println!("t[x,y:=] = {}", sig.display(&s));

    // Integers with read(a, b) = a + b and flip(a) = -a.
    let ints = FnModel::new(|sym, args: Vec<i64>| {
        if sym == read {
            args[0] + args[1]
        } else {
            -args[0]
        }
    });
    let value = eval_in_model(&t, &ints, &|v: &&str| Some(if *v == "x" { 5 } else { 3 }))?;
    println!("t(5, 3)  = {value}");
    Ok(())
}
