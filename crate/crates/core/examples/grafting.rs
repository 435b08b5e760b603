//! State surgery: grafting one observation, a path, and an infinite spine.

use comodels::comodel::{anamorphism, graft, graft_inf, graft_word, FiniteComodel, Lasso};
use comodels::theory::{Path, Signature};

fn main() -> comodels::Result<()> {
    let sig = Signature::new([("a", 2), ("b", 3)])?;
    let (a, b) = (sig.lookup("a").unwrap(), sig.lookup("b").unwrap());
    let s = anamorphism(
        &FiniteComodel::new(sig.clone(), vec![vec![(0, 0), (2, 0)]])?,
        0,
    )?;

    let g = graft(&s, a, 1)?;
    println!(
        "graft a=1: answers {:?}, after a {:?}",
        g.head(),
        g.derivative(a)?.head()
    );

    let p = Path(vec![(b, 1), (a, 1)]);
    let gw = graft_word(&s, &p)?;
    println!(
        "graft {}: b={}, then a={}",
        sig.display_path(&p),
        gw.output(b)?,
        gw.derivative(b)?.output(a)?
    );

    let spine = Lasso::new(vec![(a, 1)], vec![(b, 0), (b, 1)])?;
    let mut cur = graft_inf(&s, &spine)?;
    for k in 0..6 {
        let &(sym, i) = spine.get(k);
        assert_eq!(cur.output(sym)?, i);
        print!("{}={} ", sig.name(sym), i);
        cur = cur.derivative(sym)?;
    }
    println!("along the spine");
    Ok(())
}
