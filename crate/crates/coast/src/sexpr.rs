//! S-expression reader shared by the four planning file formats.
//!
//! Comments start with `;` and run to end of line. Symbols are
//! case-preserving; keyword comparison happens at a higher layer.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Sym(String, Loc),
    List(Vec<Sexpr>, Loc),
}

impl Sexpr {
    pub fn loc(&self) -> Loc {
        match self {
            Sexpr::Sym(_, l) | Sexpr::List(_, l) => *l,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexpr::Sym(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Sym(..) => None,
        }
    }

    /// True if this node is a symbol equal to `kw` ignoring ASCII case.
    pub fn is_kw(&self, kw: &str) -> bool {
        self.as_sym().map_or(false, |s| s.eq_ignore_ascii_case(kw))
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("{loc}: {msg}")]
pub struct SexprError {
    pub loc: Loc,
    pub msg: String,
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn loc(&self) -> Loc {
        Loc { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn read(&mut self) -> Result<Sexpr, SexprError> {
        self.skip_trivia();
        let loc = self.loc();
        match self.peek() {
            None => Err(SexprError { loc, msg: "unexpected end of input".into() }),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexpr::List(items, loc));
                        }
                        None => {
                            return Err(SexprError {
                                loc,
                                msg: "unclosed parenthesis".into(),
                            })
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(SexprError { loc, msg: "unexpected ')'".into() }),
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.bump();
                }
                let text = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| SexprError { loc, msg: "invalid UTF-8 in symbol".into() })?;
                Ok(Sexpr::Sym(text.to_string(), loc))
            }
        }
    }
}

/// Read every top-level form in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexpr>, SexprError> {
    let mut r = Reader::new(src);
    let mut forms = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(forms);
        }
        forms.push(r.read()?);
    }
}

/// Read exactly one top-level form.
pub fn read_one(src: &str) -> Result<Sexpr, SexprError> {
    let forms = read_all(src)?;
    match forms.len() {
        1 => Ok(forms.into_iter().next().unwrap()),
        0 => Err(SexprError { loc: Loc { line: 1, col: 1 }, msg: "empty input".into() }),
        _ => Err(SexprError {
            loc: forms[1].loc(),
            msg: "expected a single top-level form".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = read_one("(a (b c) d)").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].as_sym(), Some("a"));
        assert_eq!(items[1].as_list().unwrap().len(), 2);
    }

    #[test]
    fn skips_comments_and_tracks_locations() {
        let e = read_one("; header\n(x ; inline\n  y)").unwrap();
        assert_eq!(e.loc(), Loc { line: 2, col: 1 });
        let items = e.as_list().unwrap();
        assert_eq!(items[1].loc().line, 3);
    }

    #[test]
    fn rejects_unclosed_paren() {
        let err = read_one("(a (b)").unwrap_err();
        assert!(err.msg.contains("unclosed"));
    }

    #[test]
    fn keyword_match_is_case_insensitive() {
        let e = read_one("(:ACTION Pick)").unwrap();
        assert!(e.as_list().unwrap()[0].is_kw(":action"));
        // identifier case is preserved
        assert_eq!(e.as_list().unwrap()[1].as_sym(), Some("Pick"));
    }
}
