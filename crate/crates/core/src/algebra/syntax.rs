//! Text syntax for elements of `C(m,1)[t]`.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' integer]
//! atom   := integer | 't' | 'I'k | 'U'k | 'Um' | 'L'k | 'R'k | '(' expr ')'
//! ```
//!
//! Integers and `t` stand for multiples of the unit, so `3*t^2*I1` is
//! `3 t^2 I_1`. `U2..U{m-1}` denote the sums `R_i L_i + L_i R_i`.

use std::fmt;

use thiserror::Error;

use super::{AlgebraContext, AlgebraElement, AlgebraError, Generator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at position {}: {}",
            self.position, self.message
        )
    }
}

struct Parser<'a> {
    ctx: &'a AlgebraContext,
    src: &'a [u8],
    pos: usize,
}

pub(super) fn parse(ctx: &AlgebraContext, text: &str) -> Result<AlgebraElement, AlgebraError> {
    let mut p = Parser {
        ctx,
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input").into());
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

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

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| ParseError {
                position: start,
                message: "integer too large".into(),
            })
    }

    fn expr(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                acc = acc.sum(&t);
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = acc.sub(&t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = self.ctx.multiply(&acc, &f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let k = self.integer()?;
        if k == 0 {
            return Err(ParseError {
                position: at,
                message: "exponent must be positive".into(),
            }
            .into());
        }
        let mut acc = base.clone();
        for _ in 1..k {
            acc = self.ctx.multiply(&acc, &base)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.error("unexpected end of input").into()),
        };
        if c.is_ascii_digit() {
            let n = self.integer()?;
            let n = i64::try_from(n).map_err(|_| ParseError {
                position: start,
                message: "integer too large".into(),
            })?;
            return Ok(self.ctx.one().scaled(n));
        }
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'").into());
            }
            return Ok(e);
        }
        self.pos += 1;
        let m = self.ctx.m();
        let index = |p: &mut Self| -> Result<usize, AlgebraError> {
            if p.src.get(p.pos) == Some(&b'm') {
                p.pos += 1;
                return Ok(m);
            }
            if !p.src.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                return Err(p.error("expected an index").into());
            }
            let k = p.integer()?;
            Ok(k as usize)
        };
        let out_of_range = |k: usize| -> AlgebraError {
            ParseError {
                position: start,
                message: format!("index {k} out of range for m = {m}"),
            }
            .into()
        };
        match c {
            b't' => Ok(self.ctx.t()),
            b'I' => {
                let k = index(self)?;
                self.ctx.idempotent(k).map_err(|_| out_of_range(k))
            }
            b'U' => {
                let k = index(self)?;
                self.ctx.u_element(k).map_err(|_| out_of_range(k))
            }
            b'L' | b'R' => {
                let k = index(self)?;
                if !(2..m).contains(&k) {
                    return Err(out_of_range(k));
                }
                let g = if c == b'L' {
                    Generator::L(k as u8)
                } else {
                    Generator::R(k as u8)
                };
                self.ctx.generator(g)
            }
            _ => {
                self.pos = start;
                Err(self
                    .error(format!("unexpected character '{}'", c as char))
                    .into())
            }
        }
    }
}
