//! Parsing a document and evaluating expressions against it.

use comodels::dsl::sexpr::read_one;
use comodels::dsl::{eval_fn, eval_state, Document};
use comodels::streams::stream_letters;

const DOC: &str = "
(sig bits (read 2))
(comodel alt bits (state q0 (read 0 q1)) (state q1 (read 1 q0)))
(transducer neg (in bits) (out bits)
  (state p (read (read (leaf 1 p) (leaf 0 p)))))
(stream s (prefix 1) (cycle 0 1))
";

fn main() -> Result<(), comodels::dsl::DslError> {
    let doc = Document::parse(DOC)?;
    print!("{doc}");
    let f = eval_fn(&doc, &read_one("(reflect neg p)")?)?;
    for e in ["s", "(ana alt q0)", "(graft s read 0)"] {
        let x = eval_state(&doc, &read_one(e)?)?;
        let y = f.apply(&x)?;
        println!(
            "{e}: {:?} -> {:?}",
            stream_letters(&x, 6)?,
            stream_letters(&y, 6)?
        );
    }
    Ok(())
}
