//! Reifying a reflected transducer and reflecting the result back.

use comodels::bimodel::{reify, ReifyBudget};
use comodels::comodel::op_equiv;
use comodels::residual::reflect_transducer;
use comodels::sample;
use comodels::theory::Signature;

fn main() -> comodels::Result<()> {
    let ins = Signature::new([("a", 2), ("b", 2)])?;
    let outs = Signature::new([("x", 2)])?;
    let mut rng = sample::rng(1);
    let tr = sample::random_transducer(&ins, &outs, 3, 2, &mut rng);
    let f = reflect_transducer(&tr, 0)?;

    let r = reify(&f, &ReifyBudget::default().with_tree_depth(8))?;
    println!(
        "reified: {} states, {} explored, closed: {}",
        r.comodel().state_count(),
        r.comodel().explored_count(),
        r.is_closed()
    );
    if r.is_closed() {
        let tr = r.to_transducer()?;
        for q in 0..tr.state_count() {
            for tau in outs.symbols() {
                let t = tr
                    .term(q, tau)?
                    .map_vars(|(i, next)| format!("{i}/r{next}"));
                println!("  r{q} {}: {}", outs.name(tau), ins.display(&t));
            }
        }
    }

    let g = r.reflect();
    let mut agree = 0;
    for _ in 0..20 {
        let s = sample::random_state(&ins, 4, &mut rng);
        agree += op_equiv(&f.apply(&s)?, &g.apply(&s)?, 8)? as usize;
    }
    println!("reflect(reify(f)) agrees with f on {agree} of 20 environments");
    Ok(())
}
