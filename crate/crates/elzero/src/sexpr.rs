//! Minimal s-expression reader/writer shared by every file format in this
//! crate (formulas, sequents, proofs, code stores, realizers, witnesses).

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Error)]
pub enum SexpError {
    #[error("unexpected end of input at byte {0}")]
    UnexpectedEof(usize),
    #[error("unexpected `)` at byte {0}")]
    UnexpectedClose(usize),
    #[error("trailing content at byte {0}")]
    Trailing(usize),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::Atom(_) => None,
            Sexp::List(items) => Some(items),
        }
    }

    /// Head symbol of a list form, e.g. `imp` for `(imp a b)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom)
    }
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b';' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SexpError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Err(SexpError::UnexpectedEof(self.pos));
        }
        match self.src[self.pos] {
            b'(' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.pos >= self.src.len() {
                        return Err(SexpError::UnexpectedEof(self.pos));
                    }
                    if self.src[self.pos] == b')' {
                        self.pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    items.push(self.read()?);
                }
            }
            b')' => Err(SexpError::UnexpectedClose(self.pos)),
            _ => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos])
                    .expect("atom slice is ascii-delimited utf8")
                    .to_string();
                Ok(Sexp::Atom(text))
            }
        }
    }
}

/// Parse exactly one s-expression; trailing non-comment content is an error.
pub fn parse_one(src: &str) -> Result<Sexp, SexpError> {
    let mut r = Reader { src: src.as_bytes(), pos: 0 };
    let s = r.read()?;
    r.skip_ws();
    if r.pos < r.src.len() {
        return Err(SexpError::Trailing(r.pos));
    }
    Ok(s)
}

/// Parse a sequence of s-expressions (one record per store entry etc.).
pub fn parse_many(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut r = Reader { src: src.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    loop {
        r.skip_ws();
        if r.pos >= r.src.len() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => write!(f, "{a}"),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = parse_one("(imp (eq x1 0) bot)").unwrap();
        assert_eq!(s.to_string(), "(imp (eq x1 0) bot)");
    }

    #[test]
    fn comments_and_many() {
        let all = parse_many("; header\n(a b) (c)\n; tail\n").unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn errors() {
        assert!(parse_one("(a").is_err());
        assert!(parse_one(")").is_err());
        assert!(parse_one("(a) b").is_err());
    }
}
