use crate::theory::{Model, Term};

/// A term with leaves in `B × X` containing no subterm `σ(λi.(b, x_i))`
/// whose leaves all carry the same `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopowerNormalTerm<B, X>(Term<(B, X)>);

impl<B, X> CopowerNormalTerm<B, X> {
    pub fn term(&self) -> &Term<(B, X)> {
        &self.0
    }

    pub fn into_term(self) -> Term<(B, X)> {
        self.0
    }
}

/// Whether `t` has no banned subterm: an application whose children are all
/// leaves with one common label.
pub fn is_copower_normal<B: PartialEq, X>(t: &Term<(B, X)>) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(_, cs) => !uniform_leaves(cs) && cs.iter().all(is_copower_normal),
    }
}

fn uniform_leaves<B: PartialEq, X>(cs: &[Term<(B, X)>]) -> bool {
    let mut labels = cs.iter().map(|c| c.as_var().map(|(b, _)| b));
    match labels.next() {
        Some(Some(b)) => labels.all(|l| l == Some(b)),
        _ => false,
    }
}

/// Rewrites `σ(λi.(b, x_i))` to `(b, ⟦σ⟧(λi.x_i))` innermost first until no
/// banned subterm remains.
///
/// Each rewrite removes a node, so the process terminates; the result does
/// not depend on the order of rewrites.
pub fn normalize_copower<B, M>(
    t: &Term<(B, M::Carrier)>,
    model: &M,
) -> CopowerNormalTerm<B, M::Carrier>
where
    B: Clone + PartialEq,
    M: Model,
{
    CopowerNormalTerm(normalize(t, model))
}

fn normalize<B, M>(t: &Term<(B, M::Carrier)>, model: &M) -> Term<(B, M::Carrier)>
where
    B: Clone + PartialEq,
    M: Model,
{
    match t {
        Term::Var(leaf) => Term::Var(leaf.clone()),
        Term::App(sym, cs) => {
            let cs: Vec<_> = cs.iter().map(|c| normalize(c, model)).collect();
            if !uniform_leaves(&cs) {
                return Term::App(*sym, cs);
            }
            let mut b = None;
            let xs = cs
                .into_iter()
                .map(|c| match c {
                    Term::Var((label, x)) => {
                        b.get_or_insert(label);
                        x
                    }
                    Term::App(..) => unreachable!("uniform children are leaves"),
                })
                .collect();
            Term::Var((b.expect("arity is positive"), model.operate(*sym, xs)))
        }
    }
}
