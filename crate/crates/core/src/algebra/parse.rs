//! Recursive-descent reader for polynomial expressions such as
//! `1/2*sqrt(3)*(w^-1 - z^-1)` or `(z-1)(w+1)^2`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::exact::Rational;
use super::laurent::{Coefficient, LaurentPoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(decimal(&text).ok_or_else(|| {
                Error::parse(input, format!("bad number `{}`", text))
            })?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::parse(input, format!("unexpected character `{}`", c)));
        }
    }
    Ok(out)
}

/// Exact rational value of a decimal literal.
fn decimal(text: &str) -> Option<Rational> {
    let mut parts = text.split('.');
    let int = parts.next()?;
    let frac = parts.next().unwrap_or("");
    if parts.next().is_some() || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{}{}", int, frac);
    let n: BigInt = digits.parse().ok()?;
    let d = BigInt::from(10u32).pow(frac.len() as u32);
    Some(Rational::new(n, d))
}

struct Parser<'a, C> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String],
    input: &'a str,
    _c: std::marker::PhantomData<C>,
}

impl<'a, C: Coefficient> Parser<'a, C> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.input, msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<LaurentPoly<C>> {
        let mut acc = LaurentPoly::zero(self.nvars());
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('('))
        )
    }

    fn term(&mut self) -> Result<LaurentPoly<C>> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                acc = acc.mul(&self.invert(&d)?);
            } else if self.starts_factor() {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn invert(&self, p: &LaurentPoly<C>) -> Result<LaurentPoly<C>> {
        if p.len() != 1 {
            return Err(self.err("division only by a monomial"));
        }
        let (e, c) = p.terms().next().unwrap();
        let inv = c.inverse().ok_or_else(|| self.err("division by zero"))?;
        Ok(LaurentPoly::monomial(e.iter().map(|x| -x).collect(), inv))
    }

    fn exponent(&mut self) -> Result<i32> {
        let paren = self.eat('(');
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let n = match self.peek().cloned() {
            Some(Tok::Num(q)) if q.is_integer() => {
                self.pos += 1;
                q.to_integer()
                    .to_i32()
                    .ok_or_else(|| self.err("exponent too large"))?
            }
            _ => return Err(self.err("expected integer exponent")),
        };
        if paren && !self.eat(')') {
            return Err(self.err("unclosed exponent"));
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<LaurentPoly<C>> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = self.exponent()?;
        if k >= 0 {
            Ok(base.pow(k as u32))
        } else {
            Ok(self.invert(&base)?.pow((-k) as u32))
        }
    }

    fn atom(&mut self) -> Result<LaurentPoly<C>> {
        let n = self.nvars();
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(LaurentPoly::constant(n, C::from_rational(&q)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("unbalanced parenthesis"));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) if name == "sqrt" => {
                self.pos += 1;
                if !self.eat('(') {
                    return Err(self.err("expected ( after sqrt"));
                }
                let r = match self.peek().cloned() {
                    Some(Tok::Num(q)) if q.is_integer() && !q.is_zero() => {
                        self.pos += 1;
                        q.to_integer()
                            .to_u64()
                            .ok_or_else(|| self.err("bad radicand"))?
                    }
                    _ => return Err(self.err("sqrt takes a positive integer")),
                };
                if !self.eat(')') {
                    return Err(self.err("unclosed sqrt"));
                }
                Ok(LaurentPoly::constant(n, C::sqrt_of(r)))
            }
            Some(Tok::Ident(name)) => {
                let j = self
                    .names
                    .iter()
                    .position(|v| *v == name)
                    .or_else(|| alias(&name, n))
                    .ok_or_else(|| self.err(format!("unknown variable `{}`", name)))?;
                self.pos += 1;
                Ok(LaurentPoly::variable(n, j))
            }
            other => Err(self.err(format!("unexpected token {:?}", other))),
        }
    }
}

/// `z`, `w` and `z1..zd` are interchangeable spellings for the first variables.
fn alias(name: &str, nvars: usize) -> Option<usize> {
    let j = match name {
        "z" => 0,
        "w" => 1,
        _ => name
            .strip_prefix('z')?
            .parse::<usize>()
            .ok()?
            .checked_sub(1)?,
    };
    (j < nvars).then_some(j)
}

pub fn parse_polynomial<C: Coefficient>(input: &str, names: &[String]) -> Result<LaurentPoly<C>> {
    let toks = tokenize(input)?;
    if toks.is_empty() {
        return Err(Error::parse(input, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        names,
        input,
        _c: std::marker::PhantomData,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Evaluates a variable-free expression to a scalar.
pub fn parse_scalar<C: Coefficient>(input: &str) -> Result<C> {
    let p = parse_polynomial::<C>(input, &[])?;
    p.as_constant()
        .ok_or_else(|| Error::parse(input, "not a constant"))
}
