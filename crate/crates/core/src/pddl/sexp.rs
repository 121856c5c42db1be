//! Minimal s-expression reader for PDDL files. Symbols are
//! case-normalized to lowercase; `;` starts a line comment.

use super::PddlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Sym(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v) => Some(v),
            Sexp::Sym(_) => None,
        }
    }

    /// The leading symbol of a list, e.g. `:init` of `(:init ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_sym()
    }
}

pub fn parse_sexp(text: &str) -> Result<Sexp, PddlError> {
    let mut parser = SexpParser {
        src: text.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
    };
    parser.skip_ws();
    let e = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.err("trailing content after the top-level expression"));
    }
    Ok(e)
}

struct SexpParser<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> SexpParser<'a> {
    fn err(&self, message: &str) -> PddlError {
        PddlError::SExpr {
            line: self.line,
            col: self.col,
            message: message.to_string(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == b';' {
                while let Some(c) = self.peek() {
                    if c == b'\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<Sexp, PddlError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(self.expr()?),
                        None => return Err(self.err("unclosed `(`")),
                    }
                }
            }
            Some(b')') => Err(self.err("unexpected `)`")),
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    s.push((c as char).to_ascii_lowercase());
                    self.bump();
                }
                Ok(Sexp::Sym(s))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Splits a PDDL typed list (`a b - t c d - u e`) into `(item, type)`
/// pairs; trailing untyped items get `default_type`.
pub fn typed_list(items: &[Sexp], default_type: &str) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = items[i]
            .as_sym()
            .ok_or_else(|| PddlError::Malformed("nested list inside a typed list".to_string()))?;
        if sym == "-" {
            let ty = items
                .get(i + 1)
                .and_then(Sexp::as_sym)
                .ok_or_else(|| PddlError::Malformed("`-` not followed by a type".to_string()))?;
            for item in pending.drain(..) {
                out.push((item, ty.to_string()));
            }
            i += 2;
        } else {
            pending.push(sym.to_string());
            i += 1;
        }
    }
    for item in pending {
        out.push((item, default_type.to_string()));
    }
    Ok(out)
}
