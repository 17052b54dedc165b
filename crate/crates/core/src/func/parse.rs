//! Recursive-descent parser for the function grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ['^' ['-'] integer]
//! atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func   := exp | log | sin | cos | arctan
//! ```
//!
//! A parenthesised signed fraction such as `(-1/2)` is read as a single
//! rational constant, which is how constants render. Offsets in errors are
//! 0-based byte offsets into the input.

use rug::{Integer, Rational};

use super::ast::FunctionExpr as E;
use crate::error::{Error, Result};
use crate::scalar;

pub fn parse(text: &str) -> Result<E> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&format!("unexpected `{}`", p.peek().unwrap() as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<E> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = E::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = E::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<E> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = E::mul(lhs, self.factor()?);
            } else if self.eat(b'/') {
                lhs = E::div(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<E> {
        if self.eat(b'-') {
            return Ok(E::neg(self.factor()?));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let n = self.exponent()?;
            return Ok(E::pow(base, n));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected an integer exponent"));
        }
        let v: i32 =
            digits.parse().map_err(|_| Error::Syntax { offset: start, message: "exponent out of range".into() })?;
        if paren {
            self.expect(b')')?;
        }
        Ok(if neg { -v } else { v })
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn atom(&mut self) -> Result<E> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'(') => {
                if let Some(c) = self.fraction_literal() {
                    return Ok(c);
                }
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                if name == "x" {
                    return Ok(E::x());
                }
                let ctor: fn(E) -> E = match name {
                    "exp" => E::exp,
                    "log" => E::log,
                    "sin" => E::sin,
                    "cos" => E::cos,
                    "arctan" => E::arctan,
                    _ => return Err(Error::UnknownFunction { name: name.to_string(), offset: start }),
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(ctor(arg))
            }
            Some(c) => Err(self.error(&format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<E> {
        let start = self.pos;
        self.digits();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            self.digits();
        }
        let lit = &self.text[start..self.pos];
        scalar::parse_rational(lit)
            .map(E::Const)
            .map_err(|_| Error::Syntax { offset: start, message: format!("bad number `{lit}`") })
    }

    /// `( [-] digits [/ digits] )` as one constant; restores the position
    /// when the input does not have that shape.
    fn fraction_literal(&mut self) -> Option<E> {
        let save = self.pos;
        let r = self.try_fraction();
        if r.is_none() {
            self.pos = save;
        }
        r
    }

    fn try_fraction(&mut self) -> Option<E> {
        self.pos += 1;
        let neg = self.eat(b'-');
        self.skip_ws();
        let p = self.digits();
        if p.is_empty() {
            return None;
        }
        let mut value = Rational::from(p.parse::<Integer>().ok()?);
        if self.eat(b'/') {
            self.skip_ws();
            let q = self.digits();
            if q.is_empty() {
                return None;
            }
            let q: Integer = q.parse().ok()?;
            if q == 0 {
                return None;
            }
            value /= q;
        }
        if !self.eat(b')') {
            return None;
        }
        Some(E::Const(if neg { -value } else { value }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!(parse("x^3").unwrap(), E::pow(E::x(), 3));
        assert_eq!(parse("arctan(exp(x))").unwrap(), E::arctan(E::exp(E::x())));
        assert_eq!(parse("arctan(exp(x)"), Err(Error::Syntax { offset: 13, message: "expected `)`".into() }));
    }

    #[test]
    fn precedence_and_associativity() {
        let x = E::x;
        assert_eq!(parse("1 + 2*x").unwrap(), E::add(E::int(1), E::mul(E::int(2), x())));
        assert_eq!(parse("x - x - 1").unwrap(), E::sub(E::sub(x(), x()), E::int(1)));
        assert_eq!(parse("-x^2").unwrap(), E::neg(E::pow(x(), 2)));
        assert_eq!(parse("x^-2").unwrap(), E::pow(x(), -2));
        assert_eq!(parse("x^(-2)").unwrap(), E::pow(x(), -2));
        assert_eq!(parse("(-1/2)*x").unwrap(), E::mul(E::constant(Rational::from((-1, 2))), x()));
        assert_eq!(parse("0.25").unwrap(), E::constant(Rational::from((1, 4))));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse("tan(x)"), Err(Error::UnknownFunction { name: "tan".into(), offset: 0 }));
        assert!(matches!(parse("x +"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("x )"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("x^1.5"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn render_round_trips() {
        for src in [
            "x^3",
            "arctan(exp(x))",
            "x - (x + 1)",
            "(-1/2)*x^-3 + exp(-x)",
            "sin(x)/(1 + cos(x)^2)",
            "log(x)*0",
            "--x",
            "2*x*(x - 3)/x",
            "(x + 1)^2 - x^2",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }
}
