//! Shared helpers for integration tests.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use comodels::cli::execute;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// The invocations listed in `corpus/commands.txt`, one per line, with
/// arguments separated by `|`.
pub fn golden_commands() -> Vec<Vec<String>> {
    let text = fs::read_to_string(corpus_dir().join("commands.txt")).expect("commands.txt exists");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('|').map(str::to_string).collect())
        .collect()
}

/// Runs one invocation from the crate root and renders a transcript: the
/// command line, stdout, stderr and the exit code.
pub fn transcript(args: &[String]) -> String {
    let outcome = execute(std::iter::once("comodels".to_string()).chain(args.iter().cloned()));
    format!(
        "$ {}\n{}{}[exit {}]\n",
        args.join(" | "),
        outcome.stdout,
        outcome.stderr,
        outcome.code
    )
}

pub fn golden_path(k: usize, args: &[String]) -> PathBuf {
    corpus_dir()
        .join("golden")
        .join(format!("{k:02}-{}.out", args[0]))
}

/// Runs the whole suite and returns `(golden file, transcript)` pairs.
pub fn run_golden_suite() -> Vec<(PathBuf, String)> {
    // Relative corpus paths in commands.txt are resolved from the crate root.
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).expect("crate root exists");
    golden_commands()
        .iter()
        .enumerate()
        .map(|(k, args)| (golden_path(k, args), transcript(args)))
        .collect()
}

/// Compares transcripts with the golden files, rewriting them when `BLESS`
/// is set. Returns the mismatching files.
pub fn check_golden(runs: &[(PathBuf, String)]) -> Vec<PathBuf> {
    let bless = std::env::var_os("BLESS").is_some();
    let mut bad = Vec::new();
    for (path, text) in runs {
        if bless {
            fs::create_dir_all(path.parent().expect("has a parent")).expect("golden dir");
            fs::write(path, text).expect("golden file is writable");
        } else if fs::read_to_string(path).ok().as_deref() != Some(text.as_str()) {
            bad.push(path.clone());
        }
    }
    bad
}
