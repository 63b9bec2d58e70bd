//! Points of the torus written as `t ∈ [0,1)^d`, `ω = e^{2πi t}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// One phase coordinate. Rational values stay exact so that `ω^k` is computed
/// from `k·t mod 1` without drift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coord {
    Rational(Rational64),
    Real(f64),
}

impl Coord {
    pub fn zero() -> Self {
        Coord::Rational(Rational64::zero())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Coord::Rational(Rational64::new(n, d)).wrapped()
    }

    /// Reduced into `[0,1)`.
    pub fn wrapped(self) -> Self {
        match self {
            Coord::Rational(q) => {
                let n = q.numer().mod_floor(q.denom());
                Coord::Rational(Rational64::new(n, *q.denom()))
            }
            Coord::Real(x) => {
                let y = x.rem_euclid(1.0);
                Coord::Real(if y >= 1.0 { 0.0 } else { y })
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Coord::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            Coord::Real(x) => x,
        }
    }

    /// `m·self mod 1`.
    pub fn scaled(self, m: i64) -> Self {
        match self {
            Coord::Rational(q) => Coord::Rational(q * m).wrapped(),
            Coord::Real(x) => Coord::Real(x * m as f64).wrapped(),
        }
    }

    pub fn divided(self, m: i64) -> Self {
        match self {
            Coord::Rational(q) => Coord::Rational(q / m),
            Coord::Real(x) => Coord::Real(x / m as f64),
        }
    }

    pub fn plus(self, other: Coord) -> Self {
        match (self, other) {
            (Coord::Rational(a), Coord::Rational(b)) => Coord::Rational(a + b).wrapped(),
            (a, b) => Coord::Real(a.to_f64() + b.to_f64()).wrapped(),
        }
    }

    pub fn negated(self) -> Self {
        match self {
            Coord::Rational(q) => Coord::Rational(-q).wrapped(),
            Coord::Real(x) => Coord::Real(-x).wrapped(),
        }
    }

    pub fn is_zero(self) -> bool {
        match self.wrapped() {
            Coord::Rational(q) => q.is_zero(),
            Coord::Real(x) => x == 0.0,
        }
    }

    /// Distance to the nearest integer.
    pub fn wrap_distance(self) -> f64 {
        let x = self.wrapped().to_f64();
        x.min(1.0 - x)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Rational(q) if *q.denom() == 1 => write!(f, "{}", q.numer()),
            Coord::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Coord::Real(x) => write!(f, "{}", x),
        }
    }
}

impl FromStr for Coord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| Error::parse(s, "bad numerator"))?;
            let d: i64 = d
                .trim()
                .parse()
                .map_err(|_| Error::parse(s, "bad denominator"))?;
            if d == 0 {
                return Err(Error::parse(s, "zero denominator"));
            }
            return Ok(Coord::ratio(n, d));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Coord::ratio(n, 1));
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::parse(s, "bad phase coordinate"))?;
        if !x.is_finite() {
            return Err(Error::parse(s, "phase must be finite"));
        }
        Ok(Coord::Real(x).wrapped())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phase(pub Vec<Coord>);

impl Phase {
    pub fn zero(d: usize) -> Self {
        Phase(vec![Coord::zero(); d])
    }

    pub fn from_f64(t: &[f64]) -> Self {
        Phase(t.iter().map(|&x| Coord::Real(x).wrapped()).collect())
    }

    pub fn from_ratios(t: &[(i64, i64)]) -> Self {
        Phase(t.iter().map(|&(n, d)| Coord::ratio(n, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.wrapped().to_f64()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn negated(&self) -> Self {
        Phase(self.0.iter().map(|c| c.negated()).collect())
    }

    pub fn plus(&self, other: &Phase) -> Self {
        Phase(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.plus(*b))
                .collect(),
        )
    }

    /// `k·t mod 1`.
    pub fn dot(&self, k: &[i64]) -> Coord {
        self.0
            .iter()
            .zip(k)
            .fold(Coord::zero(), |acc, (c, &m)| acc.plus(c.scaled(m)))
    }

    /// `ω^k = e^{2πi k·t}`, exact at quarter turns.
    pub fn character(&self, k: &[i64]) -> Complex64 {
        turn(self.dot(k))
    }

    pub fn omega(&self) -> Vec<Complex64> {
        self.0.iter().map(|c| turn(*c)).collect()
    }

    /// Largest per-axis wrapped distance.
    pub fn distance(&self, other: &Phase) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.plus(b.negated()).wrap_distance())
            .fold(0.0, f64::max)
    }

    /// Equality: exact when both are rational, otherwise within `1e-12` per axis.
    pub fn same_as(&self, other: &Phase) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| match (a.wrapped(), b.wrapped()) {
                    (Coord::Rational(x), Coord::Rational(y)) => x == y,
                    (x, y) => x.plus(y.negated()).wrap_distance() <= 1e-12,
                })
    }

    pub fn parse_list(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|p| p.parse::<Coord>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Phase(coords))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

/// `e^{2πi c}`.
pub fn turn(c: Coord) -> Complex64 {
    match c.wrapped() {
        Coord::Rational(q) => {
            let (n, d) = (*q.numer(), *q.denom());
            if (4 * n) % d == 0 {
                return match (4 * n) / d {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
            }
            Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 / d as f64)
        }
        Coord::Real(x) => Complex64::from_polar(1.0, std::f64::consts::TAU * x),
    }
}
