//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := number | 'u' integer | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := exp | ln | sqrt | sin | cos
//! ```
//! The exponent integer may carry a leading `-`. Whitespace is insignificant.

use super::{Expr, Func, MAX_VARS};
use crate::{Error, Result};

/// Parses `text` into an expression over a chart of dimension `dim`.
pub fn parse_expr(text: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.factor()?;
            } else if self.eat(b'/') {
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error(&["integer exponent"]));
        }
        let magnitude: i32 = digits
            .parse()
            .map_err(|_| self.error(&["integer exponent within i32 range"]))?;
        Ok(base.powi(if negative { -magnitude } else { magnitude }))
    }

    fn digits(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<Expr> {
        const EXPECTED: &[&str] = &["number", "variable u<i>", "function", "'('", "'-'"];
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.base()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error(&["')'"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(self.error(EXPECTED)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&bytes[start..i]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = i;
                Ok(Expr::constant(v))
            }
            Err(_) => Err(self.error(&["number"])),
        }
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        if name == "u" {
            let at = self.pos;
            let digits = self.digits();
            if digits.is_empty() || at != self.pos - digits.len() {
                self.pos = at;
                return Err(self.error(&["coordinate index after 'u'"]));
            }
            let index: usize = digits.parse().unwrap_or(usize::MAX);
            if index == 0 || index > self.dim || index > MAX_VARS {
                return Err(Error::IndexOutOfChart { index, dim: self.dim });
            }
            return Ok(Expr::var(index - 1));
        }
        let Some(func) = Func::from_name(&name) else {
            self.pos = start;
            return Err(self.error(&["u<i>", "exp", "ln", "sqrt", "sin", "cos"]));
        };
        if !self.eat(b'(') {
            return Err(self.error(&["'('"]));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.error(&["')'"]));
        }
        Ok(arg.apply(func))
    }
}
