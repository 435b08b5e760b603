//! Signatures of free theories, terms over them, substitution, evaluation in
//! models and Kleisli composition.
//!
//! A free theory has no equations, so its terms are exactly the finite trees
//! labelled by operation symbols with variable leaves. Terms are plain values
//! compared structurally; symbols are referred to by their position in a
//! [`Signature`].

use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An operation symbol, identified by its position in a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolDecl {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols with finite, nonzero arities.
///
/// The order is significant: it fixes the layout of observation tuples and
/// the enumeration order used by canonical searches.
#[derive(Clone)]
pub struct Signature(Arc<[SymbolDecl]>);

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Signature {}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(sig")?;
        for d in self.0.iter() {
            write!(f, " ({} {})", d.name, d.arity)?;
        }
        f.write_str(")")
    }
}

/// Builds a signature, rejecting duplicate names and nullary symbols.
pub fn validate_signature<S: AsRef<str>>(raw: &[(S, usize)]) -> Result<Signature> {
    Signature::new(raw.iter().map(|(n, a)| (n.as_ref().to_string(), *a)))
}

impl Signature {
    pub fn new<I, S>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut decls: Vec<SymbolDecl> = Vec::new();
        for (name, arity) in raw {
            let name = name.into();
            if decls.iter().any(|d| d.name == name) {
                return Err(Error::DuplicateSymbol(name));
            }
            if arity == 0 {
                return Err(Error::ZeroArity(name));
            }
            decls.push(SymbolDecl { name, arity });
        }
        Ok(Signature(decls.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.0.len()).map(Sym)
    }

    pub fn decls(&self) -> &[SymbolDecl] {
        &self.0
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.0.iter().position(|d| d.name == name).map(Sym)
    }

    /// Arity of `sym`, or `UnknownSymbol` if it is not part of this signature.
    pub fn arity(&self, sym: Sym) -> Result<usize> {
        self.0
            .get(sym.0)
            .map(|d| d.arity)
            .ok_or_else(|| Error::UnknownSymbol(format!("#{}", sym.0)))
    }

    /// Name of `sym`; unknown symbols render as `#index`.
    pub fn name(&self, sym: Sym) -> String {
        match self.0.get(sym.0) {
            Some(d) => d.name.clone(),
            None => format!("#{}", sym.0),
        }
    }

    pub(crate) fn arity_unchecked(&self, sym: Sym) -> usize {
        self.0[sym.0].arity
    }

    /// Checks that `index` is a valid branch of `sym`.
    pub fn check_index(&self, sym: Sym, index: usize) -> Result<()> {
        let arity = self.arity(sym)?;
        if index < arity {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                symbol: self.name(sym),
                index,
                arity,
            })
        }
    }

    /// Checks that every node of `t` uses a symbol of this signature with
    /// the right number of children.
    pub fn check_term<V>(&self, t: &Term<V>) -> Result<()> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(sym, children) => {
                let arity = self.arity(*sym)?;
                if children.len() != arity {
                    return Err(Error::ArityMismatch {
                        symbol: self.name(*sym),
                        expected: arity,
                        found: children.len(),
                    });
                }
                children.iter().try_for_each(|c| self.check_term(c))
            }
        }
    }

    pub fn check_path(&self, p: &Path) -> Result<()> {
        p.0.iter().try_for_each(|&(s, i)| self.check_index(s, i))
    }

    /// All words of length at most `max_len`, shortest first, each length in
    /// lexicographic order of symbol positions.
    pub fn words(&self, max_len: usize) -> Vec<Vec<Sym>> {
        let mut out = vec![Vec::new()];
        let mut start = 0;
        for _ in 0..max_len {
            let end = out.len();
            for k in start..end {
                for s in self.symbols() {
                    let mut w = out[k].clone();
                    w.push(s);
                    out.push(w);
                }
            }
            start = end;
        }
        out
    }

    /// Displays a term using the symbol names of this signature.
    pub fn display<'a, V: fmt::Display>(&'a self, t: &'a Term<V>) -> impl fmt::Display + 'a {
        TermDisplay { sig: self, term: t }
    }

    pub fn display_path<'a>(&'a self, p: &'a Path) -> impl fmt::Display + 'a {
        PathDisplay { sig: self, path: p }
    }
}

struct TermDisplay<'a, V> {
    sig: &'a Signature,
    term: &'a Term<V>,
}

impl<V: fmt::Display> fmt::Display for TermDisplay<'_, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, cs) => {
                write!(f, "({}", self.sig.name(*s))?;
                for c in cs {
                    write!(f, " {}", self.sig.display(c))?;
                }
                f.write_str(")")
            }
        }
    }
}

struct PathDisplay<'a> {
    sig: &'a Signature,
    path: &'a Path,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(path")?;
        for &(s, i) in &self.path.0 {
            write!(f, " ({} {})", self.sig.name(s), i)?;
        }
        f.write_str(")")
    }
}

/// A finite term: a variable, or a symbol applied to one child per branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term<V> {
    Var(V),
    App(Sym, Vec<Term<V>>),
}

impl<V> Term<V> {
    pub fn var(v: V) -> Self {
        Term::Var(v)
    }

    pub fn app(sym: Sym, children: Vec<Term<V>>) -> Self {
        Term::App(sym, children)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&V> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Height of the tree; variables have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, cs) => 1 + cs.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, cs) => 1 + cs.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, cs) => cs.iter().map(Term::leaf_count).sum(),
        }
    }

    /// Leaves in left-to-right order.
    pub fn vars(&self) -> Vec<&V> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a V>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::App(_, cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Monadic bind: replaces every variable by a term.
    pub fn bind<W>(&self, f: &mut impl FnMut(&V) -> Term<W>) -> Term<W> {
        match self {
            Term::Var(v) => f(v),
            Term::App(s, cs) => Term::App(*s, cs.iter().map(|c| c.bind(f)).collect()),
        }
    }

    pub fn try_bind<W, E>(
        &self,
        f: &mut impl FnMut(&V) -> std::result::Result<Term<W>, E>,
    ) -> std::result::Result<Term<W>, E> {
        match self {
            Term::Var(v) => f(v),
            Term::App(s, cs) => Ok(Term::App(
                *s,
                cs.iter()
                    .map(|c| c.try_bind(f))
                    .collect::<std::result::Result<_, _>>()?,
            )),
        }
    }

    pub fn map_vars<W>(&self, mut f: impl FnMut(&V) -> W) -> Term<W> {
        self.bind(&mut |v| Term::Var(f(v)))
    }

    /// The subterm reached by following `p` from the root.
    pub fn at_path(&self, p: &Path) -> Option<&Term<V>> {
        let mut cur = self;
        for &(s, i) in &p.0 {
            match cur {
                Term::App(t, cs) if *t == s => cur = cs.get(i)?,
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Every leaf together with the path leading to it, left to right.
    pub fn leaves(&self) -> Vec<(Path, &V)> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_leaves(&mut prefix, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, prefix: &mut Vec<(Sym, usize)>, out: &mut Vec<(Path, &'a V)>) {
        match self {
            Term::Var(v) => out.push((Path(prefix.clone()), v)),
            Term::App(s, cs) => {
                for (i, c) in cs.iter().enumerate() {
                    prefix.push((*s, i));
                    c.collect_leaves(prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}

/// Replaces each variable of `t` by the term `env` assigns to it.
///
/// Fails with `UnboundVariable` when `env` has no entry for a variable that
/// occurs in `t`.
pub fn substitute<V, W>(t: &Term<V>, env: impl Fn(&V) -> Option<Term<W>>) -> Result<Term<W>>
where
    V: fmt::Debug,
{
    t.try_bind(&mut |v| env(v).ok_or_else(|| Error::UnboundVariable(format!("{v:?}"))))
}

/// A set with one operation per symbol.
pub trait Model {
    type Carrier: Clone;

    /// Applies the operation of `sym`; `args` holds one element per branch.
    fn operate(&self, sym: Sym, args: Vec<Self::Carrier>) -> Self::Carrier;
}

/// A model given by a closure.
pub struct FnModel<X, F> {
    f: F,
    _carrier: PhantomData<fn() -> X>,
}

impl<X, F> FnModel<X, F>
where
    X: Clone,
    F: Fn(Sym, Vec<X>) -> X,
{
    pub fn new(f: F) -> Self {
        FnModel {
            f,
            _carrier: PhantomData,
        }
    }
}

impl<X: Clone, F: Fn(Sym, Vec<X>) -> X> Model for FnModel<X, F> {
    type Carrier = X;

    fn operate(&self, sym: Sym, args: Vec<X>) -> X {
        (self.f)(sym, args)
    }
}

/// The free model: operations build terms.
pub struct FreeModel<V>(PhantomData<fn() -> V>);

impl<V> Default for FreeModel<V> {
    fn default() -> Self {
        FreeModel(PhantomData)
    }
}

impl<V: Clone> Model for FreeModel<V> {
    type Carrier = Term<V>;

    fn operate(&self, sym: Sym, args: Vec<Term<V>>) -> Term<V> {
        Term::App(sym, args)
    }
}

/// Derived operation of `t` in `model`, with variables interpreted by `env`.
///
/// Over the free model with `env = Var` this is the identity, and in
/// general it is the unique model morphism out of the term model extending
/// `env`.
pub fn eval_in_model<M, V>(
    t: &Term<V>,
    model: &M,
    env: &impl Fn(&V) -> Option<M::Carrier>,
) -> Result<M::Carrier>
where
    M: Model,
    V: fmt::Debug,
{
    match t {
        Term::Var(v) => env(v).ok_or_else(|| Error::UnboundVariable(format!("{v:?}"))),
        Term::App(s, cs) => {
            let args = cs
                .iter()
                .map(|c| eval_in_model(c, model, env))
                .collect::<Result<Vec<_>>>()?;
            Ok(model.operate(*s, args))
        }
    }
}

/// Kleisli composite of `f` followed by `g`: substitute `g` into `f(a)`.
pub fn kleisli_compose<A, B, C, F, G>(f: F, g: G) -> impl Fn(&A) -> Term<C>
where
    F: Fn(&A) -> Term<B>,
    G: Fn(&B) -> Term<C>,
{
    move |a| f(a).bind(&mut |b| g(b))
}

/// A sequence of (symbol, branch) steps from the root of a term or state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<(Sym, usize)>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, sym: Sym, index: usize) -> Path {
        let mut steps = self.0.clone();
        steps.push((sym, index));
        Path(steps)
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The symbols along the path, dropping branch indices.
    pub fn word(&self) -> Vec<Sym> {
        self.0.iter().map(|&(s, _)| s).collect()
    }
}

/// Root-to-leaf paths of `t`, one per leaf, left to right.
pub fn paths<V>(t: &Term<V>) -> Vec<Path> {
    t.leaves().into_iter().map(|(p, _)| p).collect()
}
