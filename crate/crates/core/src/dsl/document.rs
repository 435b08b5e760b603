use std::collections::HashMap;
use std::fmt;

use super::sexpr::{read_all, Sexp};
use super::{at, unknown, DslError};
use crate::comodel::{FiniteComodel, Lasso};
use crate::residual::ResidualTransducer;
use crate::streams::GhpTree;
use crate::theory::{Signature, Sym, Term};

const LEAF: &str = "leaf";

/// The value of a named top-level form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Sig(Signature),
    Comodel {
        sig: String,
        states: Vec<String>,
        machine: FiniteComodel,
    },
    Transducer {
        in_sig: String,
        out_sig: String,
        states: Vec<String>,
        transducer: ResidualTransducer,
    },
    Ghp {
        states: Vec<String>,
        tree: GhpTree,
    },
    Stream {
        arity: usize,
        letters: Lasso<usize>,
    },
    Term {
        sig: String,
        term: Term<String>,
    },
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Sig(_) => "sig",
            Item::Comodel { .. } => "comodel",
            Item::Transducer { .. } => "transducer",
            Item::Ghp { .. } => "ghp",
            Item::Stream { .. } => "stream",
            Item::Term { .. } => "term",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub name: String,
    pub item: Item,
}

/// An ordered list of uniquely named forms whose references all resolve to
/// earlier forms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    forms: Vec<Form>,
    index: HashMap<String, usize>,
}

impl Document {
    pub fn new() -> Self {
        Document::default()
    }

    /// Parses and validates a document.
    pub fn parse(text: &str) -> Result<Self, DslError> {
        let mut doc = Document::new();
        for x in read_all(text)? {
            let form = doc.parse_form(&x)?;
            doc.push(form)?;
        }
        Ok(doc)
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn get(&self, name: &str) -> Option<&Form> {
        self.index.get(name).map(|&k| &self.forms[k])
    }

    /// Appends a form after checking that its name is fresh and its
    /// references resolve.
    pub fn push(&mut self, form: Form) -> Result<(), DslError> {
        if self.index.contains_key(&form.name) {
            return Err(DslError::DuplicateName(form.name));
        }
        match &form.item {
            Item::Comodel { sig, .. } | Item::Term { sig, .. } => {
                self.signature(sig)?;
            }
            Item::Transducer {
                in_sig, out_sig, ..
            } => {
                self.signature(in_sig)?;
                self.signature(out_sig)?;
            }
            Item::Sig(_) | Item::Ghp { .. } | Item::Stream { .. } => {}
        }
        self.index.insert(form.name.clone(), self.forms.len());
        self.forms.push(form);
        Ok(())
    }

    fn lookup(&self, kind: &str, name: &str) -> Result<&Item, DslError> {
        match self.get(name) {
            Some(f) if f.item.kind() == kind => Ok(&f.item),
            _ => Err(unknown(kind, name)),
        }
    }

    pub fn signature(&self, name: &str) -> Result<&Signature, DslError> {
        match self.lookup("sig", name)? {
            Item::Sig(s) => Ok(s),
            _ => unreachable!("kind checked"),
        }
    }

    /// The name of a signature form equal to `sig`, if there is one.
    pub fn signature_name(&self, sig: &Signature) -> Option<&str> {
        self.forms.iter().find_map(|f| match &f.item {
            Item::Sig(s) if s == sig => Some(f.name.as_str()),
            _ => None,
        })
    }

    /// A machine and the index of its state named `state`.
    pub fn comodel_state(
        &self,
        name: &str,
        state: &str,
    ) -> Result<(&FiniteComodel, usize), DslError> {
        match self.lookup("comodel", name)? {
            Item::Comodel {
                states, machine, ..
            } => Ok((machine, state_index(states, state)?)),
            _ => unreachable!("kind checked"),
        }
    }

    pub fn transducer_state(
        &self,
        name: &str,
        state: &str,
    ) -> Result<(&ResidualTransducer, usize), DslError> {
        match self.lookup("transducer", name)? {
            Item::Transducer {
                states, transducer, ..
            } => Ok((transducer, state_index(states, state)?)),
            _ => unreachable!("kind checked"),
        }
    }

    pub fn ghp_state(&self, name: &str, state: &str) -> Result<(&GhpTree, usize), DslError> {
        match self.lookup("ghp", name)? {
            Item::Ghp { states, tree } => Ok((tree, state_index(states, state)?)),
            _ => unreachable!("kind checked"),
        }
    }

    pub fn stream(&self, name: &str) -> Result<(usize, &Lasso<usize>), DslError> {
        match self.lookup("stream", name)? {
            Item::Stream { arity, letters } => Ok((*arity, letters)),
            _ => unreachable!("kind checked"),
        }
    }

    /// A term form with its signature.
    pub fn term(&self, name: &str) -> Result<(&Signature, &Term<String>), DslError> {
        match self.lookup("term", name)? {
            Item::Term { sig, term } => Ok((self.signature(sig)?, term)),
            _ => unreachable!("kind checked"),
        }
    }

    fn parse_form(&self, x: &Sexp) -> Result<Form, DslError> {
        let items = list(x, "a form")?;
        let (kind, form_name) = match items {
            [k, n, ..] => (atom(k, "a form kind")?, name(n)?),
            _ => return Err(at(x.pos(), "expected `(kind name ...)`")),
        };
        let body = &items[2..];
        let item = match kind {
            "sig" => Item::Sig(parse_sig(body)?),
            "comodel" => self.parse_comodel(x, body)?,
            "transducer" => self.parse_transducer(x, body)?,
            "ghp" => parse_ghp(x, body)?,
            "stream" => parse_stream(x, body)?,
            "term" => {
                let [s, t] = body else {
                    return Err(at(x.pos(), "expected `(term name sig body)`"));
                };
                let sig_name = name(s)?;
                let term = parse_term(self.signature(sig_name)?, t)?;
                Item::Term {
                    sig: sig_name.into(),
                    term,
                }
            }
            other => return Err(at(items[0].pos(), format!("unknown form kind `{other}`"))),
        };
        Ok(Form {
            name: form_name.into(),
            item,
        })
    }

    fn parse_comodel(&self, x: &Sexp, body: &[Sexp]) -> Result<Item, DslError> {
        let Some((s, rows)) = body.split_first() else {
            return Err(at(x.pos(), "expected `(comodel name sig (state ...) ...)`"));
        };
        let sig_name = name(s)?;
        let sig = self.signature(sig_name)?;
        let states = state_names(rows)?;
        let mut table = Vec::new();
        for row in rows {
            let entries = &list(row, "a state")?[2..];
            let mut cells: Vec<Option<(usize, usize)>> = vec![None; sig.len()];
            for e in entries {
                let [sym, out, next] = list(e, "a transition")? else {
                    return Err(at(e.pos(), "expected `(symbol answer next-state)`"));
                };
                let sym = symbol(sig, sym)?;
                if cells[sym.0].is_some() {
                    return Err(at(e.pos(), "symbol answered twice"));
                }
                cells[sym.0] = Some((nat(out)?, state_ref(&states, next)?));
            }
            let row_cells: Option<Vec<_>> = cells.into_iter().collect();
            table.push(row_cells.ok_or_else(|| at(row.pos(), "every symbol needs a transition"))?);
        }
        Ok(Item::Comodel {
            sig: sig_name.into(),
            machine: FiniteComodel::new(sig.clone(), table)?,
            states,
        })
    }

    fn parse_transducer(&self, x: &Sexp, body: &[Sexp]) -> Result<Item, DslError> {
        let [i, o, rows @ ..] = body else {
            return Err(at(
                x.pos(),
                "expected `(transducer name (in sig) (out sig) ...)`",
            ));
        };
        let in_name = tagged_atom(i, "in")?;
        let out_name = tagged_atom(o, "out")?;
        let (in_sig, out_sig) = (self.signature(in_name)?, self.signature(out_name)?);
        reserve_leaf(in_sig, i)?;
        let states = state_names(rows)?;
        let mut table = Vec::new();
        for row in rows {
            let entries = &list(row, "a state")?[2..];
            let mut cells: Vec<Option<Term<(usize, usize)>>> = vec![None; out_sig.len()];
            for e in entries {
                let [sym, t] = list(e, "an output step")? else {
                    return Err(at(e.pos(), "expected `(output-symbol term)`"));
                };
                let sym = symbol(out_sig, sym)?;
                if cells[sym.0].is_some() {
                    return Err(at(e.pos(), "output symbol given twice"));
                }
                let term =
                    parse_leaf_term(in_sig, t, &mut |b, q| Ok((nat(b)?, state_ref(&states, q)?)))?;
                cells[sym.0] = Some(term);
            }
            let row_cells: Option<Vec<_>> = cells.into_iter().collect();
            table.push(row_cells.ok_or_else(|| at(row.pos(), "every output symbol needs a step"))?);
        }
        Ok(Item::Transducer {
            in_sig: in_name.into(),
            out_sig: out_name.into(),
            transducer: ResidualTransducer::new(in_sig.clone(), out_sig.clone(), table)?,
            states,
        })
    }
}

fn list<'a>(x: &'a Sexp, what: &str) -> Result<&'a [Sexp], DslError> {
    x.as_list()
        .ok_or_else(|| at(x.pos(), format!("expected {what}")))
}

fn atom<'a>(x: &'a Sexp, what: &str) -> Result<&'a str, DslError> {
    x.as_atom()
        .ok_or_else(|| at(x.pos(), format!("expected {what}")))
}

fn nat(x: &Sexp) -> Result<usize, DslError> {
    atom(x, "a natural number")?
        .parse()
        .map_err(|_| at(x.pos(), "expected a natural number"))
}

fn name(x: &Sexp) -> Result<&str, DslError> {
    let a = atom(x, "a name")?;
    if a.parse::<usize>().is_ok() {
        return Err(at(x.pos(), "names must not be numbers"));
    }
    Ok(a)
}

/// The atom in `(tag atom)`.
fn tagged_atom<'a>(x: &'a Sexp, tag: &str) -> Result<&'a str, DslError> {
    match list(x, &format!("`({tag} ...)`"))? {
        [t, a] if t.as_atom() == Some(tag) => name(a),
        _ => Err(at(x.pos(), format!("expected `({tag} name)`"))),
    }
}

/// The elements of `(tag x ...)`.
fn tagged<'a>(x: &'a Sexp, tag: &str) -> Result<&'a [Sexp], DslError> {
    match list(x, &format!("`({tag} ...)`"))? {
        [t, rest @ ..] if t.as_atom() == Some(tag) => Ok(rest),
        _ => Err(at(x.pos(), format!("expected `({tag} ...)`"))),
    }
}

fn symbol(sig: &Signature, x: &Sexp) -> Result<Sym, DslError> {
    let a = atom(x, "a symbol")?;
    sig.lookup(a)
        .ok_or_else(|| at(x.pos(), format!("`{a}` is not a symbol of {sig:?}")))
}

fn reserve_leaf(sig: &Signature, x: &Sexp) -> Result<(), DslError> {
    match sig.lookup(LEAF) {
        Some(_) => Err(at(x.pos(), "`leaf` cannot be an input symbol here")),
        None => Ok(()),
    }
}

fn state_names(rows: &[Sexp]) -> Result<Vec<String>, DslError> {
    let mut names: Vec<String> = Vec::new();
    for row in rows {
        let n = match list(row, "a state")? {
            [t, n, ..] if t.as_atom() == Some("state") => name(n)?,
            _ => return Err(at(row.pos(), "expected `(state name ...)`")),
        };
        if names.iter().any(|m| m == n) {
            return Err(at(row.pos(), format!("duplicate state `{n}`")));
        }
        names.push(n.into());
    }
    if names.is_empty() {
        return Err(DslError::Validation(crate::Error::InvalidState {
            state: 0,
            count: 0,
        }));
    }
    Ok(names)
}

fn state_index(states: &[String], state: &str) -> Result<usize, DslError> {
    states
        .iter()
        .position(|s| s == state)
        .ok_or_else(|| unknown("state", state))
}

fn state_ref(states: &[String], x: &Sexp) -> Result<usize, DslError> {
    state_index(states, atom(x, "a state name")?)
}

fn parse_sig(body: &[Sexp]) -> Result<Signature, DslError> {
    let mut decls = Vec::new();
    for d in body {
        let [s, n] = list(d, "`(symbol arity)`")? else {
            return Err(at(d.pos(), "expected `(symbol arity)`"));
        };
        decls.push((name(s)?.to_string(), nat(n)?));
    }
    Ok(Signature::new(decls)?)
}

/// A term whose bare atoms are variables.
pub(crate) fn parse_term(sig: &Signature, x: &Sexp) -> Result<Term<String>, DslError> {
    match x {
        Sexp::Atom(a, _) => Ok(Term::Var(a.clone())),
        Sexp::List(items, pos) => {
            let Some((head, args)) = items.split_first() else {
                return Err(at(*pos, "empty term"));
            };
            let sym = symbol(sig, head)?;
            check_arity(sig, sym, args.len(), *pos)?;
            let children = args
                .iter()
                .map(|a| parse_term(sig, a))
                .collect::<Result<_, _>>()?;
            Ok(Term::App(sym, children))
        }
    }
}

/// A term whose leaves are `(leaf b q)`.
fn parse_leaf_term<V>(
    sig: &Signature,
    x: &Sexp,
    leaf: &mut impl FnMut(&Sexp, &Sexp) -> Result<V, DslError>,
) -> Result<Term<V>, DslError> {
    let items = list(x, "a term")?;
    match items {
        [h, b, q] if h.as_atom() == Some(LEAF) => Ok(Term::Var(leaf(b, q)?)),
        [h, ..] if h.as_atom() == Some(LEAF) => Err(at(x.pos(), "expected `(leaf answer state)`")),
        [head, args @ ..] => {
            let sym = symbol(sig, head)?;
            check_arity(sig, sym, args.len(), x.pos())?;
            let children = args
                .iter()
                .map(|a| parse_leaf_term(sig, a, leaf))
                .collect::<Result<_, _>>()?;
            Ok(Term::App(sym, children))
        }
        [] => Err(at(x.pos(), "empty term")),
    }
}

fn check_arity(
    sig: &Signature,
    sym: Sym,
    found: usize,
    pos: super::sexpr::Pos,
) -> Result<(), DslError> {
    let expected = sig.arity_unchecked(sym);
    if expected == found {
        Ok(())
    } else {
        Err(at(
            pos,
            format!(
                "`{}` takes {expected} branches, found {found}",
                sig.name(sym)
            ),
        ))
    }
}

fn parse_ghp(x: &Sexp, body: &[Sexp]) -> Result<Item, DslError> {
    let [i, a, rows @ ..] = body else {
        return Err(at(
            x.pos(),
            "expected `(ghp name (input n) (alphabet ...) ...)`",
        ));
    };
    let arity = match tagged(i, "input")? {
        [n] => nat(n)?,
        _ => return Err(at(i.pos(), "expected `(input n)`")),
    };
    let alphabet: Vec<String> = tagged(a, "alphabet")?
        .iter()
        .map(|l| name(l).map(String::from))
        .collect::<Result<_, _>>()?;
    let in_sig = crate::streams::stream_signature(arity)?;
    let states = state_names(rows)?;
    let mut terms = Vec::new();
    for row in rows {
        let [_, _, t] = list(row, "a state")? else {
            return Err(at(row.pos(), "expected `(state name term)`"));
        };
        terms.push(parse_leaf_term(&in_sig, t, &mut |b, q| {
            let letter = atom(b, "an output letter")?;
            let k = alphabet
                .iter()
                .position(|l| l == letter)
                .ok_or_else(|| at(b.pos(), format!("`{letter}` is not in the alphabet")))?;
            Ok((k, state_ref(&states, q)?))
        })?);
    }
    Ok(Item::Ghp {
        tree: GhpTree::new(arity, alphabet, terms)?,
        states,
    })
}

/// The body of a `stream` form or expression: `(arity n)?`, `(prefix ...)`,
/// `(cycle ...)`.
pub(crate) fn parse_stream(x: &Sexp, body: &[Sexp]) -> Result<Item, DslError> {
    let (arity, rest) = match body.split_first() {
        Some((a, rest)) if a.head() == Some("arity") => match tagged(a, "arity")? {
            [n] => (Some(nat(n)?), rest),
            _ => return Err(at(a.pos(), "expected `(arity n)`")),
        },
        _ => (None, body),
    };
    let (prefix, cycle) = match rest {
        [p, c] => (tagged(p, "prefix")?, tagged(c, "cycle")?),
        [c] => (&[][..], tagged(c, "cycle")?),
        _ => return Err(at(x.pos(), "expected `(prefix ...)` and `(cycle ...)`")),
    };
    let letters = |xs: &[Sexp]| xs.iter().map(nat).collect::<Result<Vec<_>, _>>();
    let letters = Lasso::new(letters(prefix)?, letters(cycle)?)?;
    let top = letters
        .prefix()
        .iter()
        .chain(letters.cycle())
        .copied()
        .max()
        .unwrap_or(0);
    let arity = arity.unwrap_or((top + 1).max(2));
    let sig = crate::streams::stream_signature(arity)?;
    if let Some(&bad) = letters
        .prefix()
        .iter()
        .chain(letters.cycle())
        .find(|&&l| l >= arity)
    {
        sig.check_index(Sym(0), bad)?;
    }
    Ok(Item::Stream { arity, letters })
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for form in &self.forms {
            writeln!(f, "{}", FormDisplay { doc: self, form })?;
        }
        Ok(())
    }
}

impl Document {
    /// The canonical text of one form.
    pub fn form_text(&self, form: &Form) -> String {
        FormDisplay { doc: self, form }.to_string()
    }
}

struct FormDisplay<'a> {
    doc: &'a Document,
    form: &'a Form,
}

fn write_leaf_term<V>(
    f: &mut fmt::Formatter<'_>,
    sig: &Signature,
    t: &Term<V>,
    leaf: &impl Fn(&V) -> String,
) -> fmt::Result {
    match t {
        Term::Var(v) => write!(f, "({LEAF} {})", leaf(v)),
        Term::App(s, cs) => {
            write!(f, "({}", sig.name(*s))?;
            for c in cs {
                f.write_str(" ")?;
                write_leaf_term(f, sig, c, leaf)?;
            }
            f.write_str(")")
        }
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, tag: &str, xs: &[usize]) -> fmt::Result {
    write!(f, "({tag}")?;
    for x in xs {
        write!(f, " {x}")?;
    }
    f.write_str(")")
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = &self.form.name;
        match &self.form.item {
            Item::Sig(sig) => {
                write!(f, "(sig {name}")?;
                for d in sig.decls() {
                    write!(f, " ({} {})", d.name, d.arity)?;
                }
                f.write_str(")")
            }
            Item::Comodel {
                sig,
                states,
                machine,
            } => {
                write!(f, "(comodel {name} {sig}")?;
                let s = machine.signature();
                for (q, qn) in states.iter().enumerate() {
                    write!(f, "\n  (state {qn}")?;
                    for sym in s.symbols() {
                        let (out, next) = machine.transition(q, sym).expect("valid machine");
                        write!(f, " ({} {out} {})", s.name(sym), states[next])?;
                    }
                    f.write_str(")")?;
                }
                f.write_str(")")
            }
            Item::Transducer {
                in_sig,
                out_sig,
                states,
                transducer,
            } => {
                write!(f, "(transducer {name} (in {in_sig}) (out {out_sig})")?;
                let (is, os) = (
                    self.doc.signature(in_sig).expect("validated"),
                    self.doc.signature(out_sig).expect("validated"),
                );
                for (q, qn) in states.iter().enumerate() {
                    write!(f, "\n  (state {qn}")?;
                    for tau in os.symbols() {
                        write!(f, " ({} ", os.name(tau))?;
                        let t = transducer.term(q, tau).expect("valid transducer");
                        write_leaf_term(f, is, t, &|(b, n)| format!("{b} {}", states[*n]))?;
                        f.write_str(")")?;
                    }
                    f.write_str(")")?;
                }
                f.write_str(")")
            }
            Item::Ghp { states, tree } => {
                let arity = tree.input_signature().arity_unchecked(Sym(0));
                write!(f, "(ghp {name} (input {arity}) (alphabet")?;
                for l in tree.alphabet() {
                    write!(f, " {l}")?;
                }
                f.write_str(")")?;
                for (q, qn) in states.iter().enumerate() {
                    write!(f, "\n  (state {qn} ")?;
                    let t = tree.term(q).expect("valid tree");
                    write_leaf_term(f, tree.input_signature(), t, &|(b, n)| {
                        format!("{} {}", tree.alphabet()[*b], states[*n])
                    })?;
                    f.write_str(")")?;
                }
                f.write_str(")")
            }
            Item::Stream { arity, letters } => {
                write!(f, "(stream {name} (arity {arity}) ")?;
                write_letters(f, "prefix", letters.prefix())?;
                f.write_str(" ")?;
                write_letters(f, "cycle", letters.cycle())?;
                f.write_str(")")
            }
            Item::Term { sig, term } => {
                let s = self.doc.signature(sig).expect("validated");
                write!(f, "(term {name} {sig} {})", s.display(term))
            }
        }
    }
}
