//! Exact arithmetic in the ring generated over Q by square roots of positive integers.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A finite sum `Σ q_s·√s` over square-free radicands `s`.
///
/// Terms are kept sorted by radicand with no zero coefficients, so structural
/// equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactReal {
    terms: Vec<(u64, Rational)>,
}

/// Splits `n` into `(f, s)` with `n = f²·s` and `s` square-free.
pub fn square_free_split(n: u64) -> (u64, u64) {
    let mut f = 1u64;
    let mut s = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            f *= p;
        }
        if e % 2 == 1 {
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (f, s * m)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(q: Rational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            ExactReal {
                terms: vec![(1, q)],
            }
        }
    }

    /// `√n` for a positive integer, with square factors pulled out.
    pub fn sqrt(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let (f, s) = square_free_split(n);
        let q = Rational::from_integer(BigInt::from(f));
        ExactReal {
            terms: vec![(s, q)],
        }
    }

    fn from_map(map: BTreeMap<u64, Rational>) -> Self {
        ExactReal {
            terms: map.into_iter().filter(|(_, q)| !q.is_zero()).collect(),
        }
    }

    /// Radicand/coefficient pairs in increasing radicand order.
    pub fn terms(&self) -> &[(u64, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 1 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(s, _)| *s == 1)
    }

    /// Coefficient of radicand 1.
    pub fn rational_part(&self) -> Rational {
        match self.terms.first() {
            Some((1, q)) => q.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn coefficient(&self, radicand: u64) -> Rational {
        self.terms
            .iter()
            .find(|(s, _)| *s == radicand)
            .map(|(_, q)| q.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, q)| q.to_f64().unwrap_or(f64::NAN) * (*s as f64).sqrt())
            .sum()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        ExactReal {
            terms: self.terms.iter().map(|(s, c)| (*s, c * q)).collect(),
        }
    }

    /// Galois conjugation flipping the sign of every `√s` with `p | s`.
    pub fn conjugate_at_prime(&self, p: u64) -> Self {
        ExactReal {
            terms: self
                .terms
                .iter()
                .map(|(s, q)| {
                    if s % p == 0 {
                        (*s, -q)
                    } else {
                        (*s, q.clone())
                    }
                })
                .collect(),
        }
    }

    /// Multiplicative inverse by repeated conjugation.
    ///
    /// Multiplying `a` by `σ_p(a)` removes every radicand divisible by `p`;
    /// after one pass per prime the norm is rational.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let mut num = ExactReal::one();
        let mut den = self.clone();
        while !den.is_rational() {
            let radicand = den
                .terms
                .iter()
                .map(|(s, _)| *s)
                .find(|s| *s != 1)
                .expect("irrational term present");
            let p = prime_factors(radicand)[0];
            let conj = den.conjugate_at_prime(p);
            num = &num * &conj;
            den = &den * &conj;
        }
        let q = den.rational_part();
        Ok(num.scale(&q.recip()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = ExactReal::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of the real value. Decided in floating point, refined by squaring
    /// when the approximation is too close to zero to trust.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let v = self.to_f64();
        if v.abs() > 1e-9 * self.l1_size() {
            return if v > 0.0 { 1 } else { -1 };
        }
        // Split off one prime: a = x + y·√p with x, y free of p.
        let p = self
            .terms
            .iter()
            .find(|(s, _)| *s != 1)
            .map(|(s, _)| prime_factors(*s)[0]);
        let Some(p) = p else {
            return if self.terms[0].1.is_positive() { 1 } else { -1 };
        };
        let mut x = BTreeMap::new();
        let mut y = BTreeMap::new();
        for (s, q) in &self.terms {
            if s % p == 0 {
                y.insert(s / p, q.clone());
            } else {
                x.insert(*s, q.clone());
            }
        }
        let x = ExactReal::from_map(x);
        let y = ExactReal::from_map(y);
        let sx = x.signum();
        let sy = y.signum();
        if sx == 0 {
            return sy;
        }
        if sy == 0 || sx == sy {
            return sx;
        }
        // Opposite signs: compare x² with p·y².
        let x2 = &x * &x;
        let py2 = (&y * &y).scale(&Rational::from_integer(BigInt::from(p)));
        let d = (&x2 - &py2).signum();
        if d == 0 {
            0
        } else if d > 0 {
            sx
        } else {
            sy
        }
    }

    fn l1_size(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, q)| q.to_f64().unwrap_or(0.0).abs() * (*s as f64).sqrt())
            .sum()
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::from_integer(n)
    }
}

impl From<Rational> for ExactReal {
    fn from(q: Rational) -> Self {
        ExactReal::from_rational(q)
    }
}

impl<'a> Add<&'a ExactReal> for &'a ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &ExactReal) -> ExactReal {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (sa, qa) = &self.terms[i];
            let (sb, qb) = &rhs.terms[j];
            match sa.cmp(sb) {
                std::cmp::Ordering::Less => {
                    out.push((*sa, qa.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*sb, qb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let q = qa + qb;
                    if !q.is_zero() {
                        out.push((*sa, q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&rhs.terms[j..]);
        ExactReal { terms: out }
    }
}

impl<'a> Sub<&'a ExactReal> for &'a ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: &ExactReal) -> ExactReal {
        self + &(-rhs)
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal {
            terms: self.terms.iter().map(|(s, q)| (*s, -q)).collect(),
        }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

impl<'a> Mul<&'a ExactReal> for &'a ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: &ExactReal) -> ExactReal {
        if self.is_zero() || rhs.is_zero() {
            return ExactReal::zero();
        }
        if self.terms.len() == 1 && self.terms[0].0 == 1 {
            return rhs.scale(&self.terms[0].1);
        }
        if rhs.terms.len() == 1 && rhs.terms[0].0 == 1 {
            return self.scale(&rhs.terms[0].1);
        }
        let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
        for (sa, qa) in &self.terms {
            for (sb, qb) in &rhs.terms {
                let g = sa.gcd(sb);
                let s = (sa / g).checked_mul(sb / g).expect("radicand overflow");
                let q = qa * qb * Rational::from_integer(BigInt::from(g));
                let e = map.entry(s).or_insert_with(Rational::zero);
                *e += q;
            }
        }
        ExactReal::from_map(map)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $m(self, rhs: ExactReal) -> ExactReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $m(self, rhs: &'a ExactReal) -> ExactReal {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_term(f: &mut fmt::Formatter<'_>, s: u64, q: &Rational) -> fmt::Result {
    if s == 1 {
        write!(f, "{}", q)
    } else if q.is_one() {
        write!(f, "sqrt({})", s)
    } else {
        write!(f, "{}*sqrt({})", q, s)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, q)) in self.terms.iter().enumerate() {
            if i == 0 {
                if q.is_negative() && *s != 1 {
                    write!(f, "-")?;
                    fmt_term(f, *s, &-q)?;
                } else {
                    fmt_term(f, *s, q)?;
                }
            } else if q.is_negative() {
                write!(f, " - ")?;
                fmt_term(f, *s, &-q)?;
            } else {
                write!(f, " + ")?;
                fmt_term(f, *s, q)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactReal({})", self)
    }
}

/// Parses the document grammar `term (('+'|'-') term)*` where a term is a
/// rational, `rational*sqrt(n)` or `sqrt(n)`.
impl FromStr for ExactReal {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse(input, "empty expression"));
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut acc = ExactReal::zero();
        let mut first = true;
        while pos < bytes.len() {
            let mut sign = 1i64;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -1;
                }
                pos += 1;
            } else if !first {
                return Err(Error::parse(input, "expected '+' or '-' between terms"));
            }
            first = false;
            let term = parse_term(&s, &mut pos).map_err(|m| Error::parse(input, m))?;
            acc = &acc + &term.scale(&Rational::from_integer(BigInt::from(sign)));
        }
        Ok(acc)
    }
}

fn parse_uint(s: &str, pos: &mut usize) -> std::result::Result<BigInt, String> {
    let start = *pos;
    let b = s.as_bytes();
    while *pos < b.len() && b[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(format!("expected digits at offset {}", start));
    }
    s[start..*pos].parse::<BigInt>().map_err(|e| e.to_string())
}

fn parse_sqrt(s: &str, pos: &mut usize) -> std::result::Result<ExactReal, String> {
    if !s[*pos..].starts_with("sqrt(") {
        return Err(format!("expected sqrt( at offset {}", *pos));
    }
    *pos += 5;
    let n = parse_uint(s, pos)?;
    if !s[*pos..].starts_with(')') {
        return Err("unclosed sqrt(".to_string());
    }
    *pos += 1;
    let n = n.to_u64().ok_or("radicand too large")?;
    if n == 0 {
        return Err("radicand must be positive".to_string());
    }
    Ok(ExactReal::sqrt(n))
}

fn parse_term(s: &str, pos: &mut usize) -> std::result::Result<ExactReal, String> {
    if s[*pos..].starts_with("sqrt(") {
        return parse_sqrt(s, pos);
    }
    let num = parse_uint(s, pos)?;
    let mut q = Rational::from_integer(num);
    if s[*pos..].starts_with('/') {
        *pos += 1;
        let den = parse_uint(s, pos)?;
        if den.is_zero() {
            return Err("zero denominator".to_string());
        }
        q /= Rational::from_integer(den);
    }
    if s[*pos..].starts_with('*') {
        *pos += 1;
        let r = parse_sqrt(s, pos)?;
        return Ok(r.scale(&q));
    }
    Ok(ExactReal::from_rational(q))
}
