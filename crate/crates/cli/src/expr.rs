//! Real-number expressions for `reduce` and `cf`.
//!
//! Grammar:
//! ```text
//! expr   = term (("+" | "-") term)*
//! term   = unary (("*" | "/") unary)*
//! unary  = "-" unary | power
//! power  = atom ("^" integer)?
//! atom   = number | "(" expr ")" | name "(" args ")"
//! ```
//! Functions: `log(x)`, `sqrt(x)`, `alpha(k)` (dominant root), `coef(k)`
//! (`f_k(α)(2α − 1)`), `tau(k)` (`log α/log 10`).

use alrep_core::algebraic::{dominant_root, lucas_coefficient};
use alrep_core::arith::{parse_decimal, LazyReal};
use alrep_core::{Ball, Precision};
use num_bigint::BigInt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt, BigInt),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
    Alpha(u32),
    Coef(u32),
    Tau(u32),
}

#[derive(Debug, thiserror::Error)]
#[error("bad expression at byte {pos}: {msg}")]
pub struct ExprError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        txt.parse().or_else(|_| self.err("expected a small nonnegative integer"))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.call(),
            _ => self.err("expected a number, '(' or a function"),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'+' || c == b'-') && matches!(self.s[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        match parse_decimal(txt) {
            Ok((p, q)) => Ok(Expr::Num(p, q)),
            Err(e) => self.err(e.to_string()),
        }
    }

    fn call(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii").to_string();
        self.expect(b'(')?;
        let e = match name.as_str() {
            "log" => Expr::Log(Box::new(self.expr()?)),
            "sqrt" => Expr::Sqrt(Box::new(self.expr()?)),
            "alpha" | "coef" | "tau" => {
                let k = self.integer()?;
                if k < 2 {
                    return self.err("order must be at least 2");
                }
                match name.as_str() {
                    "alpha" => Expr::Alpha(k),
                    "coef" => Expr::Coef(k),
                    _ => Expr::Tau(k),
                }
            }
            _ => {
                self.pos = start;
                return self.err(format!("unknown function '{name}'"));
            }
        };
        self.expect(b')')?;
        Ok(e)
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, p: Precision) -> alrep_core::Result<Ball> {
        use Expr::*;
        Ok(match self {
            Num(a, b) => Ball::from_rational(a, b, p)?,
            Neg(x) => x.eval(p)?.neg(),
            Add(x, y) => x.eval(p)?.add(&y.eval(p)?),
            Sub(x, y) => x.eval(p)?.sub(&y.eval(p)?),
            Mul(x, y) => x.eval(p)?.mul(&y.eval(p)?),
            Div(x, y) => x.eval(p)?.div(&y.eval(p)?)?,
            Pow(x, e) => x.eval(p)?.powi(*e as u64),
            Log(x) => x.eval(p)?.log()?,
            Sqrt(x) => x.eval(p)?.sqrt()?,
            Alpha(k) => dominant_root(*k, p)?.alpha().clone(),
            Coef(k) => lucas_coefficient(*k, &dominant_root(*k, p)?)?,
            Tau(k) => dominant_root(*k, p)?.alpha().log()?.div(&alrep_core::arith::ln10(p))?,
        })
    }
}

/// A lazily evaluated real whose cache id is the normalized source text.
pub fn lazy(src: &str) -> Result<LazyReal, ExprError> {
    let e = Arc::new(parse(src)?);
    let id: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    Ok(LazyReal::memoized(id, move |p| {
        let w = p.at_least(p.bits() + 64);
        Ok(e.eval(w)?.with_precision(p))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(s: &str) -> f64 {
        parse(s).unwrap().eval(Precision::new(128).unwrap()).unwrap().to_f64()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(val("1 + 2*3"), 7.0);
        assert_eq!(val("-(1 - 4)/2"), 1.5);
        assert_eq!(val("2^10"), 1024.0);
        assert_eq!(val("1.5e2"), 150.0);
    }

    #[test]
    fn functions() {
        assert!((val("log(2)/log(10)") - std::f64::consts::LOG10_2).abs() < 1e-14);
        assert!((val("sqrt(2)") - 2f64.sqrt()).abs() < 1e-15);
        assert!((val("alpha(2)") - 1.618033988749895).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert!(parse("1 +").is_err());
        assert!(parse("foo(1)").is_err());
        assert!(parse("alpha(1)").is_err());
        assert!(parse("(1").is_err());
        assert!(parse("1 2").is_err());
    }
}
