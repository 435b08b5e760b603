//! A function that reads two incompatible observations is rejected by
//! reification at every tree depth.

use comodels::bimodel::{parallel_xor, reify, ReifyBudget};
use comodels::theory::Signature;

fn main() -> comodels::Result<()> {
    let pair = Signature::new([("a", 2), ("b", 2)])?;
    let bit = Signature::new([("x", 2)])?;
    let f = parallel_xor(&pair, &bit)?;
    for depth in 0..=4 {
        match reify(&f, &ReifyBudget::default().with_tree_depth(depth)) {
            Ok(_) => println!("depth {depth}: accepted"),
            Err(e) => println!("depth {depth}: {e}"),
        }
    }
    Ok(())
}
