//! Command-line entry points. Every command reads a document, evaluates
//! expressions against it and prints a line-oriented s-expression report.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bimodel::{reify, ReifyBudget, DEFAULT_SEED};
use crate::comodel::{derived_coop, in_subbasis, op_equiv, path_along, FinalState};
use crate::dsl::sexpr::read_one;
use crate::dsl::{eval_fn, eval_state, eval_term, Document, DslError, Form, Item};
use crate::residual::ResidualTransducer;
use crate::theory::Signature;

#[derive(Debug, Parser)]
#[command(
    name = "comodels",
    about = "Comodels, transducers and straight functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Observation depth for behaviors and comparisons.
    #[arg(long, global = true, default_value_t = 8)]
    pub depth: usize,
    /// Deepest decision tree tried when reifying.
    #[arg(long, global = true, default_value_t = 4)]
    pub tree_depth: usize,
    /// States explored eagerly when reifying.
    #[arg(long, global = true, default_value_t = 64)]
    pub max_states: usize,
    /// Output depth compared when merging reified states.
    #[arg(long, global = true, default_value_t = 6)]
    pub probe_depth: usize,
    /// Seed for the random probe states used when reifying.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the document in canonical layout.
    Fmt { file: PathBuf },
    /// Print the behavior of a state: the answer tuple at every word.
    Behave { file: PathBuf, state: String },
    /// Run a term against a state: the variable reached and what remains.
    Eval {
        file: PathBuf,
        term: String,
        state: String,
    },
    /// Whether a state lies in the set where a term returns a variable.
    Member {
        file: PathBuf,
        state: String,
        term: String,
        var: String,
    },
    /// The path a state selects through a term.
    Path {
        file: PathBuf,
        term: String,
        state: String,
    },
    /// Apply a function to an input and print the output behavior.
    Run {
        file: PathBuf,
        function: String,
        input: String,
    },
    /// Whether two states agree on every word up to the depth.
    Equiv {
        file: PathBuf,
        left: String,
        right: String,
    },
    /// Reify a function into a transducer, with exploration counts.
    Reify { file: PathBuf, function: String },
    /// The canonical transducer of a function.
    Canon { file: PathBuf, function: String },
}

/// What a command printed and its exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments (including the program name) and runs the command.
/// Usage errors exit with 2, domain errors with 1.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            Outcome {
                code,
                stdout,
                stderr,
            }
        }
    }
}

enum Failure {
    Io(String),
    Dsl(DslError),
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        Failure::Dsl(e)
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Dsl(e.into())
    }
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Outcome {
    let mut out = String::new();
    match dispatch(cli, &mut out) {
        Ok(()) => Outcome {
            code: 0,
            stdout: out,
            stderr: String::new(),
        },
        Err(f) => {
            let (kind, msg) = match f {
                Failure::Io(m) => ("io", m),
                Failure::Dsl(e) => (e.kind(), e.to_string()),
            };
            Outcome {
                code: 1,
                stdout: format!("(error {kind} {})\n", quote(&msg)),
                stderr: String::new(),
            }
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn load(file: &PathBuf) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    Ok(Document::parse(&text)?)
}

fn state(doc: &Document, text: &str) -> Result<FinalState, Failure> {
    Ok(eval_state(doc, &read_one(text)?)?)
}

fn budget(cli: &Cli) -> ReifyBudget {
    ReifyBudget::default()
        .with_tree_depth(cli.tree_depth)
        .with_max_states(cli.max_states)
        .with_probe_depth(cli.probe_depth)
        .with_seed(cli.seed)
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<(), Failure> {
    match &cli.command {
        Command::Fmt { file } => {
            out.push_str(&load(file)?.to_string());
        }
        Command::Behave { file, state: s } => {
            let doc = load(file)?;
            write_behavior(out, &state(&doc, s)?, cli.depth);
        }
        Command::Eval {
            file,
            term,
            state: s,
        } => {
            let doc = load(file)?;
            let (_, t) = eval_term(&doc, &read_one(term)?)?;
            let (v, rest) = derived_coop(&t, &state(&doc, s)?)?;
            let _ = writeln!(out, "(value {v})");
            write_behavior(out, &rest, cli.depth);
        }
        Command::Member {
            file,
            state: s,
            term,
            var,
        } => {
            let doc = load(file)?;
            let (_, t) = eval_term(&doc, &read_one(term)?)?;
            let member = in_subbasis(&state(&doc, s)?, &t, var)?;
            let _ = writeln!(out, "{member}");
        }
        Command::Path {
            file,
            term,
            state: s,
        } => {
            let doc = load(file)?;
            let (sig, t) = eval_term(&doc, &read_one(term)?)?;
            let p = path_along(&t, &state(&doc, s)?)?;
            let _ = writeln!(out, "{}", sig.display_path(&p));
        }
        Command::Run {
            file,
            function,
            input,
        } => {
            let doc = load(file)?;
            let f = eval_fn(&doc, &read_one(function)?)?;
            let y = f.apply(&state(&doc, input)?)?;
            if y.signature().len() == 1 {
                let letters = crate::streams::stream_letters(&y, cli.depth)?;
                let _ = write!(out, "(letters");
                for l in letters {
                    let _ = write!(out, " {l}");
                }
                out.push_str(")\n");
            } else {
                write_behavior(out, &y, cli.depth);
            }
        }
        Command::Equiv { file, left, right } => {
            let doc = load(file)?;
            let same = op_equiv(&state(&doc, left)?, &state(&doc, right)?, cli.depth)?;
            let _ = writeln!(out, "{same}");
        }
        Command::Reify { file, function } | Command::Canon { file, function } => {
            let doc = load(file)?;
            let f = eval_fn(&doc, &read_one(function)?)?;
            let r = reify(&f, &budget(cli))?;
            let canon = matches!(cli.command, Command::Canon { .. });
            if !r.is_closed() {
                let _ = writeln!(
                    out,
                    "(lazy {} (seed {}))",
                    r.comodel().state_count(),
                    cli.seed
                );
                return Ok(());
            }
            if !canon {
                let _ = writeln!(
                    out,
                    "(reified (states {}) (explored {}))",
                    r.comodel().state_count(),
                    r.comodel().explored_count()
                );
            }
            let tr = r.to_transducer()?;
            let (name, prefix) = if canon {
                ("canonical", "c")
            } else {
                ("reified", "r")
            };
            out.push_str(&transducer_document(&doc, &tr, name, prefix)?.to_string());
        }
    }
    Ok(())
}

/// One `(at word tuple)` line per word of length at most `depth`.
fn write_behavior(out: &mut String, s: &FinalState, depth: usize) {
    let sig = s.signature();
    for w in sig.words(depth) {
        let tuple = s.behavior(&w).expect("words are over the signature");
        out.push_str("(at (");
        for (k, sym) in w.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push_str(&sig.name(*sym));
        }
        out.push_str(") (");
        for (k, i) in tuple.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{i}");
        }
        out.push_str("))\n");
    }
}

/// A standalone document holding the signatures of `tr` and `tr` itself,
/// with states named `prefix0`, `prefix1`, ...
fn transducer_document(
    doc: &Document,
    tr: &ResidualTransducer,
    name: &str,
    prefix: &str,
) -> Result<Document, Failure> {
    use crate::residual::ResidualComodel;
    let mut out = Document::new();
    let sig_name =
        |sig: &Signature, fallback: &str, out: &mut Document| -> Result<String, Failure> {
            if let Some(n) = out.signature_name(sig) {
                return Ok(n.to_string());
            }
            let n = doc.signature_name(sig).unwrap_or(fallback).to_string();
            out.push(Form {
                name: n.clone(),
                item: Item::Sig(sig.clone()),
            })?;
            Ok(n)
        };
    let in_sig = sig_name(tr.in_signature(), "in", &mut out)?;
    let out_sig = sig_name(tr.out_signature(), "out", &mut out)?;
    out.push(Form {
        name: name.into(),
        item: Item::Transducer {
            in_sig,
            out_sig,
            states: (0..tr.state_count())
                .map(|q| format!("{prefix}{q}"))
                .collect(),
            transducer: tr.clone(),
        },
    })?;
    Ok(out)
}
