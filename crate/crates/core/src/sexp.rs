//! Minimal s-expression reader for SMT-LIB2 scripts and solver responses.

use std::fmt;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexpKind {
    /// Simple or `|quoted|` symbol (quotes stripped), keywords included.
    Symbol(String),
    /// Decimal numeral, kept as text so callers choose the integer width.
    Numeral(String),
    Str(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct SexpError {
    pub pos: Pos,
    pub msg: String,
}

impl Sexp {
    pub fn symbol(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(l) => Some(l),
            _ => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(Sexp::symbol)
    }

    pub fn is_symbol(&self, s: &str) -> bool {
        self.symbol() == Some(s)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SexpKind::Symbol(s) => f.write_str(&quote_symbol(s)),
            SexpKind::Numeral(n) => f.write_str(n),
            SexpKind::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            SexpKind::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn is_simple_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/:".contains(c)
}

/// Wraps a symbol in `|...|` when it is not a legal simple symbol.
pub fn quote_symbol(s: &str) -> String {
    let simple = !s.is_empty()
        && s.chars().all(is_simple_symbol_char)
        && !s.starts_with(|c: char| c.is_ascii_digit());
    if simple {
        s.to_string()
    } else {
        format!("|{s}|")
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Reader<'a> {
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

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> SexpError {
        SexpError {
            pos,
            msg: msg.into(),
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, SexpError> {
        self.skip_trivia();
        let start = self.pos;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(self.err(start, "unclosed parenthesis")),
                        Some(')') => {
                            self.bump();
                            break;
                        }
                        Some(_) => {
                            let item = self.read()?.expect("peeked a character");
                            items.push(item);
                        }
                    }
                }
                Ok(Some(Sexp {
                    kind: SexpKind::List(items),
                    pos: start,
                }))
            }
            ')' => Err(self.err(start, "unexpected ')'")),
            '|' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated quoted symbol")),
                        Some('|') => break,
                        Some(c) => s.push(c),
                    }
                }
                Ok(Some(Sexp {
                    kind: SexpKind::Symbol(s),
                    pos: start,
                }))
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated string literal")),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
                Ok(Some(Sexp {
                    kind: SexpKind::Str(s),
                    pos: start,
                }))
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                if s.is_empty() {
                    return Err(self.err(start, format!("unexpected character {c:?}")));
                }
                let kind = if s.chars().all(|c| c.is_ascii_digit()) {
                    SexpKind::Numeral(s)
                } else {
                    SexpKind::Symbol(s)
                };
                Ok(Some(Sexp { kind, pos: start }))
            }
        }
    }
}

/// Reads every top-level s-expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(s) = reader.read()? {
        out.push(s);
    }
    Ok(out)
}
