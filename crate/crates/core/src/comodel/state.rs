use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::theory::{Signature, Sym};

/// One-step observable structure of a state: the answer to a request for
/// `sym` together with the state reached afterwards.
///
/// Implementors may assume `sym` belongs to the signature of the
/// [`FinalState`] wrapping them.
pub trait Behavior: Send + Sync {
    fn observe(&self, sym: Sym) -> (usize, FinalState);
}

/// An element of the final comodel: a behavior mapping every finite word of
/// symbols to a tuple of answers, one per symbol.
///
/// States are observed lazily. Values are immutable; caches inside nodes
/// never change what an observation returns.
#[derive(Clone)]
pub struct FinalState {
    sig: Signature,
    node: Arc<dyn Behavior>,
}

impl fmt::Debug for FinalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinalState")
            .field("head", &self.head())
            .finish_non_exhaustive()
    }
}

struct Memo<B> {
    inner: B,
    cells: Box<[OnceLock<(usize, FinalState)>]>,
}

impl<B: Behavior> Behavior for Memo<B> {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        self.cells[sym.0]
            .get_or_init(|| self.inner.observe(sym))
            .clone()
    }
}

type WordFn = dyn Fn(&[Sym]) -> Vec<usize> + Send + Sync;

struct WordBehavior {
    sig: Signature,
    f: Arc<WordFn>,
    prefix: Vec<Sym>,
    cache: Arc<Mutex<HashMap<Vec<Sym>, Vec<usize>>>>,
}

impl WordBehavior {
    fn tuple(&self) -> Vec<usize> {
        if let Some(t) = self.cache.lock().unwrap().get(&self.prefix) {
            return t.clone();
        }
        let t = (self.f)(&self.prefix);
        assert_eq!(t.len(), self.sig.len(), "behavior tuple has wrong length");
        for (s, &i) in self.sig.symbols().zip(&t) {
            assert!(
                i < self.sig.arity_unchecked(s),
                "behavior answered {i} for `{}`",
                self.sig.name(s)
            );
        }
        self.cache
            .lock()
            .unwrap()
            .entry(self.prefix.clone())
            .or_insert(t)
            .clone()
    }
}

impl Behavior for WordBehavior {
    fn observe(&self, sym: Sym) -> (usize, FinalState) {
        let out = self.tuple()[sym.0];
        let mut prefix = self.prefix.clone();
        prefix.push(sym);
        let next = WordBehavior {
            sig: self.sig.clone(),
            f: self.f.clone(),
            prefix,
            cache: self.cache.clone(),
        };
        (out, FinalState::new(self.sig.clone(), next))
    }
}

impl FinalState {
    /// Wraps a behavior node without caching.
    pub fn new(sig: Signature, node: impl Behavior + 'static) -> Self {
        FinalState {
            sig,
            node: Arc::new(node),
        }
    }

    /// Wraps a behavior node, caching each observation the first time it is
    /// made.
    pub fn memoized(sig: Signature, node: impl Behavior + 'static) -> Self {
        let cells = (0..sig.len()).map(|_| OnceLock::new()).collect();
        FinalState {
            sig,
            node: Arc::new(Memo { inner: node, cells }),
        }
    }

    /// A state given directly as its behavior `word -> tuple`.
    ///
    /// Tuples are cached per word and shared by all derivatives. The function
    /// must return one in-range answer per symbol, in signature order.
    pub fn from_word_fn(
        sig: Signature,
        f: impl Fn(&[Sym]) -> Vec<usize> + Send + Sync + 'static,
    ) -> Self {
        let node = WordBehavior {
            sig: sig.clone(),
            f: Arc::new(f),
            prefix: Vec::new(),
            cache: Arc::default(),
        };
        FinalState::new(sig, node)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Answer to `sym` and the state reached afterwards.
    pub fn observe(&self, sym: Sym) -> Result<(usize, FinalState)> {
        self.sig.arity(sym)?;
        Ok(self.node.observe(sym))
    }

    pub(crate) fn step(&self, sym: Sym) -> (usize, FinalState) {
        self.node.observe(sym)
    }

    pub fn output(&self, sym: Sym) -> Result<usize> {
        self.observe(sym).map(|(i, _)| i)
    }

    pub fn derivative(&self, sym: Sym) -> Result<FinalState> {
        self.observe(sym).map(|(_, s)| s)
    }

    /// The tuple of answers at the empty word.
    pub fn head(&self) -> Vec<usize> {
        self.sig.symbols().map(|s| self.step(s).0).collect()
    }

    /// The state reached after the requests in `word`.
    pub fn after(&self, word: &[Sym]) -> Result<FinalState> {
        let mut cur = self.clone();
        for &s in word {
            cur = cur.derivative(s)?;
        }
        Ok(cur)
    }

    /// Behavior at `word`: the answer tuple after following it.
    pub fn behavior(&self, word: &[Sym]) -> Result<Vec<usize>> {
        Ok(self.after(word)?.head())
    }

    /// Answer tuples at every word of length at most `depth`, in the order of
    /// [`Signature::words`].
    pub fn probe(&self, depth: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut level = vec![self.clone()];
        for d in 0..=depth {
            let mut next = Vec::new();
            for st in &level {
                let mut tuple = Vec::with_capacity(self.sig.len());
                for s in self.sig.symbols() {
                    let (i, child) = st.step(s);
                    tuple.push(i);
                    if d < depth {
                        next.push(child);
                    }
                }
                out.push(tuple);
            }
            level = next;
        }
        out
    }

    /// Flattened [`FinalState::probe`], used as a fingerprint.
    pub(crate) fn probe_flat(&self, depth: usize, out: &mut Vec<u32>) {
        for t in self.probe(depth) {
            out.extend(t.into_iter().map(|i| i as u32));
        }
    }
}

/// Bounded operational equivalence: the behaviors agree on all words of
/// length at most `depth`.
pub fn op_equiv(s1: &FinalState, s2: &FinalState, depth: usize) -> Result<bool> {
    if s1.signature() != s2.signature() {
        return Err(Error::SignatureMismatch(format!(
            "{:?} vs {:?}",
            s1.signature(),
            s2.signature()
        )));
    }
    Ok(agree(s1, s2, depth))
}

fn agree(s1: &FinalState, s2: &FinalState, depth: usize) -> bool {
    let mut pending = vec![(s1.clone(), s2.clone(), depth)];
    while let Some((a, b, d)) = pending.pop() {
        for s in a.sig.symbols() {
            let (i, a2) = a.step(s);
            let (j, b2) = b.step(s);
            if i != j {
                return false;
            }
            if d > 0 {
                pending.push((a2, b2, d - 1));
            }
        }
    }
    true
}
