use num_bigint::BigInt;
use num_traits::Zero;

use super::SourceSpan;
use crate::error::{Error, Result};
use crate::expr::{Expr, Rational, Var};
use crate::multiindex::MultiIndex;

/// Parse an expression; multi-indices must have `dim` entries.
pub fn parse_expr(text: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser::new(text, dim);
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error_here("unexpected trailing input"));
    }
    Ok(e)
}

pub(super) struct Parser<'a> {
    src: &'a [u8],
    pub(super) pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    pub(super) fn new(text: &'a str, dim: usize) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            dim,
        }
    }

    pub(super) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(super) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(super) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(super) fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(super) fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected `{}`", c as char)))
        }
    }

    pub(super) fn error_here(&self, message: &str) -> Error {
        let end = (self.pos + 1).min(self.src.len()).max(self.pos);
        Error::Syntax {
            span: SourceSpan::new(self.pos, end),
            message: message.to_string(),
        }
    }

    fn error_at(&self, start: usize, message: &str) -> Error {
        Error::Syntax {
            span: SourceSpan::new(start, self.pos.max(start)),
            message: message.to_string(),
        }
    }

    /// Raw digit run without leading whitespace skipping.
    fn digits(&mut self) -> Option<(usize, &'a str)> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            (start, s)
        })
    }

    fn nat(&mut self) -> Result<(usize, BigInt)> {
        self.skip_ws();
        match self.digits() {
            Some((start, s)) => Ok((start, s.parse().unwrap())),
            None => Err(self.error_here("expected a natural number")),
        }
    }

    fn small_nat(&mut self) -> Result<u32> {
        let (start, n) = self.nat()?;
        u32::try_from(n).map_err(|_| self.error_at(start, "number too large"))
    }

    pub(super) fn expr(&mut self) -> Result<Expr> {
        let negate = self.eat(b'-');
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.eat(b'+') {
                acc += self.term()?;
            } else if self.eat(b'-') {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            let e = self.small_nat()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let Some(c) = self.peek() else {
            return Err(self.error_here("unexpected end of input"));
        };
        let start = self.pos;
        match c {
            b'0'..=b'9' => {
                let (_, num) = self.nat()?;
                if self.eat(b'/') {
                    let (dstart, den) = self.nat()?;
                    if den.is_zero() {
                        return Err(self.error_at(dstart, "zero denominator"));
                    }
                    Ok(Expr::constant(Rational::new(num, den)))
                } else {
                    Ok(Expr::constant(Rational::from_integer(num)))
                }
            }
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            b'a'..=b'z' => {
                let word = self.word();
                match word {
                    "nu" => Ok(Expr::nu()),
                    "t" => Ok(Expr::t()),
                    "p" => {
                        let i = self.index(start)?;
                        Ok(Expr::var(Var::P(i)))
                    }
                    "x" | "u" => {
                        let comp = match self.digits() {
                            Some((_, s)) => s.parse::<u32>().ok(),
                            None => return Err(self.error_here("expected a component number")),
                        };
                        let comp = comp
                            .filter(|&c| c >= 1 && c as usize <= self.dim)
                            .ok_or_else(|| self.error_at(start, &format!("component must lie in 1..={}", self.dim)))?;
                        if word == "x" {
                            Ok(Expr::x(comp))
                        } else {
                            let i = self.index(start)?;
                            Ok(Expr::var(Var::U(comp, i)))
                        }
                    }
                    _ => Err(self.error_at(start, &format!("unknown identifier `{word}`"))),
                }
            }
            _ => Err(self.error_here(&format!("unexpected `{}`", c as char))),
        }
    }

    /// Letters only; digits after `x`/`u` belong to the component.
    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    /// `'_[' nat (',' nat)* ']'` directly after a field name.
    fn index(&mut self, var_start: usize) -> Result<MultiIndex> {
        if self.src.get(self.pos) != Some(&b'_') {
            return Err(self.error_here("expected `_[` after field name"));
        }
        self.pos += 1;
        self.expect(b'[')?;
        let mut entries = Vec::new();
        loop {
            if self.peek() == Some(b'-') {
                let s = self.pos;
                self.pos += 1;
                let _ = self.nat();
                return Err(Error::NegativeIndex {
                    span: SourceSpan::new(s, self.pos),
                });
            }
            entries.push(self.small_nat()?);
            if self.eat(b']') {
                break;
            }
            self.expect(b',')?;
        }
        if entries.len() != self.dim {
            return Err(Error::IndexArity {
                span: SourceSpan::new(var_start, self.pos),
                expected: self.dim,
                found: entries.len(),
            });
        }
        Ok(MultiIndex::new(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, rat, Monomial};

    #[test]
    fn basic_parses() {
        let e = parse_expr("u1_[1,0,0] + 2*p_[0,0,0]", 3).unwrap();
        assert_eq!(e, Expr::u(1, [1, 0, 0]) + Expr::p([0, 0, 0]).scale(&int(2)));
        let e = parse_expr("-1/2*u2_[0,0,0]^2", 3).unwrap();
        let m = Monomial::from_factors([(Var::u(2, [0, 0, 0]), 2)]);
        assert_eq!(e.len(), 1);
        assert_eq!(e.coefficient(&m), rat(-1, 2));
        assert_eq!(parse_expr("0", 3).unwrap(), Expr::zero());
        assert_eq!(
            parse_expr(" nu * ( x1 - t ) ^ 2 ", 2).unwrap(),
            Expr::nu() * (Expr::x(1) - Expr::t()).pow(2)
        );
        assert_eq!(parse_expr("3 - 4/6", 3).unwrap(), Expr::constant(rat(7, 3)));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_expr("u1_[1,0]", 3),
            Err(Error::IndexArity { expected: 3, found: 2, .. })
        ));
        assert!(matches!(parse_expr("u1_[-1,0,0]", 3), Err(Error::NegativeIndex { .. })));
        assert!(matches!(parse_expr("u4_[0,0,0]", 3), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x0", 3), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("1/0", 3), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("q", 3), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("u1_[0,0,0] +", 3), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("(x1", 3), Err(Error::Syntax { .. })));
        let Err(Error::Syntax { span, .. }) = parse_expr("x1 + ?", 3) else {
            panic!()
        };
        assert_eq!(span, SourceSpan::new(5, 6));
    }
}
