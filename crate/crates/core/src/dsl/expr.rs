//! Expressions denoting states, functions, spines and terms relative to a
//! document.
//!
//! ```text
//! state := stream-name
//!        | (ana comodel state-name)
//!        | (stream (arity n)? (prefix ...) (cycle ...))
//!        | (graft state symbol index)
//!        | (graft-inf state (spine (prefix (symbol index) ...) (cycle ...)))
//!        | (after state symbol ...)
//!        | (apply function state)
//! function := (reflect transducer state-name)
//!           | (ghp tree state-name)
//!           | (identity sig)
//!           | (parallel-xor in-sig out-sig)
//! term := term-name | (term sig body)
//! ```

use super::document::{parse_stream, parse_term, Item};
use super::sexpr::Sexp;
use super::{at, Document, DslError};
use crate::bimodel::{parallel_xor, StraightFn};
use crate::comodel::{anamorphism, graft, graft_inf, FinalState, InfinitePairSeq, Lasso};
use crate::residual::reflect_transducer;
use crate::streams::stream_of;
use crate::theory::{Signature, Term};

fn args<'a>(x: &'a Sexp, n: usize, shape: &str) -> Result<&'a [Sexp], DslError> {
    match x.as_list() {
        Some(items) if items.len() == n + 1 => Ok(&items[1..]),
        _ => Err(at(x.pos(), format!("expected `{shape}`"))),
    }
}

fn atom(x: &Sexp) -> Result<&str, DslError> {
    x.as_atom().ok_or_else(|| at(x.pos(), "expected a name"))
}

fn nat(x: &Sexp) -> Result<usize, DslError> {
    atom(x)?
        .parse()
        .map_err(|_| at(x.pos(), "expected a natural number"))
}

/// Evaluates a state expression.
pub fn eval_state(doc: &Document, x: &Sexp) -> Result<FinalState, DslError> {
    if let Some(name) = x.as_atom() {
        let (arity, letters) = doc.stream(name)?;
        return Ok(stream_of(arity, letters)?);
    }
    match x.head() {
        Some("ana") => {
            let [c, q] = args(x, 2, "(ana comodel state)")? else {
                unreachable!("length checked")
            };
            let (m, q) = doc.comodel_state(atom(c)?, atom(q)?)?;
            Ok(anamorphism(m, q)?)
        }
        Some("stream") => {
            let items = x.as_list().expect("has a head");
            match parse_stream(x, &items[1..])? {
                Item::Stream { arity, letters } => Ok(stream_of(arity, &letters)?),
                _ => unreachable!("parse_stream returns streams"),
            }
        }
        Some("graft") => {
            let [s, sym, i] = args(x, 3, "(graft state symbol index)")? else {
                unreachable!("length checked")
            };
            let s = eval_state(doc, s)?;
            let sym = lookup(s.signature(), sym)?;
            Ok(graft(&s, sym, nat(i)?)?)
        }
        Some("graft-inf") => {
            let [s, spine] = args(x, 2, "(graft-inf state spine)")? else {
                unreachable!("length checked")
            };
            let s = eval_state(doc, s)?;
            let seq = eval_spine(s.signature(), spine)?;
            Ok(graft_inf(&s, &seq)?)
        }
        Some("after") => {
            let items = x.as_list().expect("has a head");
            let Some((s, word)) = items[1..].split_first() else {
                return Err(at(x.pos(), "expected `(after state symbol ...)`"));
            };
            let mut cur = eval_state(doc, s)?;
            for w in word {
                let sym = lookup(cur.signature(), w)?;
                cur = cur.derivative(sym)?;
            }
            Ok(cur)
        }
        Some("apply") => {
            let [f, s] = args(x, 2, "(apply function state)")? else {
                unreachable!("length checked")
            };
            let f = eval_fn(doc, f)?;
            Ok(f.apply(&eval_state(doc, s)?)?)
        }
        _ => Err(at(x.pos(), "expected a state expression")),
    }
}

/// Evaluates a function expression.
pub fn eval_fn(doc: &Document, x: &Sexp) -> Result<StraightFn, DslError> {
    match x.head() {
        Some("reflect") => {
            let [t, q] = args(x, 2, "(reflect transducer state)")? else {
                unreachable!("length checked")
            };
            let (tr, q) = doc.transducer_state(atom(t)?, atom(q)?)?;
            Ok(reflect_transducer(tr, q)?)
        }
        Some("ghp") => {
            let [g, q] = args(x, 2, "(ghp tree state)")? else {
                unreachable!("length checked")
            };
            let (tree, q) = doc.ghp_state(atom(g)?, atom(q)?)?;
            Ok(reflect_transducer(&tree.to_transducer(), q)?)
        }
        Some("identity") => {
            let [s] = args(x, 1, "(identity sig)")? else {
                unreachable!("length checked")
            };
            Ok(StraightFn::identity(doc.signature(atom(s)?)?.clone()))
        }
        Some("parallel-xor") => {
            let [i, o] = args(x, 2, "(parallel-xor in-sig out-sig)")? else {
                unreachable!("length checked")
            };
            let (i, o) = (doc.signature(atom(i)?)?, doc.signature(atom(o)?)?);
            Ok(parallel_xor(i, o)?)
        }
        _ => Err(at(x.pos(), "expected a function expression")),
    }
}

/// Evaluates `(spine (prefix (symbol index) ...) (cycle (symbol index) ...))`.
pub fn eval_spine(sig: &Signature, x: &Sexp) -> Result<InfinitePairSeq, DslError> {
    let shape = "(spine (prefix (symbol index) ...) (cycle (symbol index) ...))";
    let [p, c] = args(x, 2, shape)? else {
        unreachable!("length checked")
    };
    if x.head() != Some("spine") || p.head() != Some("prefix") || c.head() != Some("cycle") {
        return Err(at(x.pos(), format!("expected `{shape}`")));
    }
    let pairs = |part: &Sexp| -> Result<Vec<_>, DslError> {
        let items = part.as_list().expect("has a head");
        items[1..]
            .iter()
            .map(|e| {
                let Some([s, i]) = e.as_list() else {
                    return Err(at(e.pos(), "expected `(symbol index)`"));
                };
                let (sym, i) = (lookup(sig, s)?, nat(i)?);
                sig.check_index(sym, i)?;
                Ok((sym, i))
            })
            .collect()
    };
    Ok(Lasso::new(pairs(p)?, pairs(c)?)?)
}

/// Evaluates a term reference or an inline `(term sig body)`.
pub fn eval_term(doc: &Document, x: &Sexp) -> Result<(Signature, Term<String>), DslError> {
    if let Some(name) = x.as_atom() {
        let (sig, t) = doc.term(name)?;
        return Ok((sig.clone(), t.clone()));
    }
    let [s, body] = args(x, 2, "(term sig body)")? else {
        unreachable!("length checked")
    };
    if x.head() != Some("term") {
        return Err(at(x.pos(), "expected a term name or `(term sig body)`"));
    }
    let sig = doc.signature(atom(s)?)?;
    Ok((sig.clone(), parse_term(sig, body)?))
}

fn lookup(sig: &Signature, x: &Sexp) -> Result<crate::theory::Sym, DslError> {
    let a = atom(x)?;
    sig.lookup(a)
        .ok_or_else(|| at(x.pos(), format!("`{a}` is not a symbol of {sig:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::sexpr::read_one;
    use crate::streams::stream_letters;

    fn doc() -> Document {
        Document::parse(
            "(sig bits (read 2))
             (transducer neg (in bits) (out bits) (state p (read (read (leaf 1 p) (leaf 0 p)))))
             (stream s (cycle 0 1))",
        )
        .unwrap()
    }

    fn state(text: &str) -> FinalState {
        eval_state(&doc(), &read_one(text).unwrap()).unwrap()
    }

    #[test]
    fn applies_reflected_transducer() {
        let s = state("(apply (reflect neg p) s)");
        assert_eq!(stream_letters(&s, 4).unwrap(), vec![1, 0, 1, 0]);
    }

    #[test]
    fn grafts_along_a_spine() {
        let s = state("(graft-inf s (spine (prefix (read 1)) (cycle (read 1) (read 0))))");
        assert_eq!(stream_letters(&s, 5).unwrap(), vec![1, 1, 0, 1, 0]);
    }

    #[test]
    fn unknown_names_are_reported() {
        let err = eval_state(&doc(), &read_one("(apply (reflect nope p) s)").unwrap()).unwrap_err();
        assert_eq!(err, crate::dsl::unknown("transducer", "nope"));
    }
}
