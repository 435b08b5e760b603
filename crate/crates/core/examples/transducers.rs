//! Residual transducers: derived residual terms, the tensor product with an
//! environment, and reflection into a function on streams.

use comodels::comodel::Lasso;
use comodels::residual::{
    derived_residual, reflect_transducer, tensor_observe, ResidualTransducer,
};
use comodels::streams::{stream_letters, stream_of, stream_signature};
use comodels::theory::{Sym, Term};

fn main() -> comodels::Result<()> {
    let bits = stream_signature(2)?;
    let read = Sym(0);
    // One state: read a letter and emit its complement.
    let neg = ResidualTransducer::new(
        bits.clone(),
        bits.clone(),
        vec![vec![Term::app(
            read,
            vec![Term::var((1, 0)), Term::var((0, 0))],
        )]],
    )?;

    let t = Term::app(read, vec![Term::var("x"), Term::var("y")]);
    let r = derived_residual(&neg, &t, &0)?;
    println!("derived residual of read(x, y): {r:?}");

    let env = stream_of(2, &Lasso::new(vec![], vec![0, 1, 1])?)?;
    let (i, q, rest) = tensor_observe(&neg, &0, &env, read)?;
    println!(
        "first output {i}, next state {q}, input left {:?}",
        stream_letters(&rest, 4)?
    );

    let f = reflect_transducer(&neg, 0)?;
    println!("input  {:?}", stream_letters(&env, 9)?);
    println!("output {:?}", stream_letters(&f.apply(&env)?, 9)?);
    Ok(())
}
