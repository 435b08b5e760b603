//! A minimal s-expression reader with source positions.

use std::fmt;

use super::DslError;

/// A 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs, _) => Some(xs),
            Sexp::Atom(..) => None,
        }
    }

    /// The head atom of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a, _) => f.write_str(a),
            Sexp::List(xs, _) => {
                f.write_str("(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, DslError> {
        self.skip_blank();
        let start = self.pos;
        match self.chars.peek() {
            None => Ok(None),
            Some(')') => Err(syntax(start, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(syntax(start, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, start)));
                        }
                        Some(_) => items.push(self.read()?.expect("input remains")),
                    }
                }
            }
            Some(_) => {
                let mut atom = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';') {
                        break;
                    }
                    if c == '"' {
                        return Err(syntax(self.pos, "strings are not supported"));
                    }
                    atom.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(atom, start)))
            }
        }
    }
}

fn syntax(pos: Pos, msg: &str) -> DslError {
    DslError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

/// Reads every top-level expression in `text`. `;` starts a comment that
/// runs to the end of the line.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, DslError> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(x) = r.read()? {
        out.push(x);
    }
    Ok(out)
}

/// Reads exactly one expression.
pub fn read_one(text: &str) -> Result<Sexp, DslError> {
    let mut xs = read_all(text)?;
    match xs.len() {
        1 => Ok(xs.pop().expect("one element")),
        0 => Err(syntax(Pos { line: 1, col: 1 }, "expected an expression")),
        _ => Err(syntax(xs[1].pos(), "expected a single expression")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let xs = read_all("; header\n(sig s\n  (read 2))").unwrap();
        assert_eq!(xs.len(), 1);
        assert_eq!(xs[0].pos(), Pos { line: 2, col: 1 });
        let items = xs[0].as_list().unwrap();
        assert_eq!(items[2].pos(), Pos { line: 3, col: 3 });
        assert_eq!(xs[0].to_string(), "(sig s (read 2))");
    }

    #[test]
    fn unbalanced_parenthesis_reports_its_position() {
        assert_eq!(
            read_all("(sig s\n (read 2)").unwrap_err(),
            DslError::Syntax {
                line: 1,
                col: 1,
                msg: "unclosed `(`".into()
            }
        );
        assert!(matches!(
            read_all("(a))"),
            Err(DslError::Syntax {
                line: 1,
                col: 4,
                ..
            })
        ));
    }
}
