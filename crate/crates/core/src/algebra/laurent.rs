//! Multivariate Laurent polynomials over exact or floating coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};

use super::exact::{ExactReal, Rational};
use crate::error::{Error, Result};

/// Scalar ring used for polynomial coefficients.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn from_rational(q: &Rational) -> Self;
    fn sqrt_of(n: u64) -> Self;
    fn to_f64(&self) -> f64;
    /// Sign, absolute-value text, and whether the text is a compound sum.
    fn render(&self) -> (bool, String, bool);
}

impl Coefficient for ExactReal {
    fn zero() -> Self {
        ExactReal::zero()
    }
    fn one() -> Self {
        ExactReal::one()
    }
    fn is_zero(&self) -> bool {
        ExactReal::is_zero(self)
    }
    fn is_one(&self) -> bool {
        ExactReal::is_one(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        ExactReal::inverse(self).ok()
    }
    fn from_rational(q: &Rational) -> Self {
        ExactReal::from_rational(q.clone())
    }
    fn sqrt_of(n: u64) -> Self {
        ExactReal::sqrt(n)
    }
    fn to_f64(&self) -> f64 {
        ExactReal::to_f64(self)
    }
    fn render(&self) -> (bool, String, bool) {
        let t = self.terms();
        if t.len() == 1 {
            let neg = t[0].1.is_negative();
            let abs = if neg { -self } else { self.clone() };
            (neg, abs.to_string(), false)
        } else {
            (false, format!("({})", self), true)
        }
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_one(&self) -> bool {
        *self == 1.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn sqrt_of(n: u64) -> Self {
        (n as f64).sqrt()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn render(&self) -> (bool, String, bool) {
        let shown: f64 = format!("{:.11e}", self.abs()).parse().unwrap_or(self.abs());
        (*self < 0.0, format!("{}", shown), false)
    }
}

pub type Exponent = Vec<i32>;

/// Sparse Laurent polynomial in `nvars` variables. Terms are keyed by exponent
/// vector; lexicographic order on the keys puts the leading term last.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<C> {
    nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

/// `original = unit_scalar · z^unit_monomial · normalized`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitNormalForm<C: Coefficient> {
    pub normalized: LaurentPoly<C>,
    pub unit_monomial: Exponent,
    pub unit_scalar: C,
}

impl<C: Coefficient> UnitNormalForm<C> {
    pub fn is_trivial_unit(&self) -> bool {
        self.unit_scalar.is_one() && self.unit_monomial.iter().all(|&e| e == 0)
    }
}

/// Default variable names: `z, w` in two dimensions, `z1..zd` otherwise.
pub fn variable_names(nvars: usize) -> Vec<String> {
    match nvars {
        1 => vec!["z".into()],
        2 => vec!["z".into(), "w".into()],
        _ => (1..=nvars).map(|i| format!("z{}", i)).collect(),
    }
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn monomial(exp: Exponent, c: C) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// The variable `z_j` (zero-based).
    pub fn variable(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, C::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i32]) -> C {
        self.terms.get(exp).cloned().unwrap_or_else(C::zero)
    }

    /// Constant polynomial value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, exp: Exponent, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                let s = v.plus(c);
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &c.negated());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.negated()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars.max(other.nvars));
        }
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        let mut e = vec![0; self.nvars];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                for j in 0..self.nvars {
                    e[j] = ea[j] + eb[j];
                }
                out.add_term(e.clone(), &ca.times(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.times(c)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Multiplies by the monomial `z^shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn min_exponents(&self) -> Option<Exponent> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            acc.iter().zip(e).map(|(a, b)| *a.min(b)).collect()
        }))
    }

    pub fn max_exponents(&self) -> Option<Exponent> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            acc.iter().zip(e).map(|(a, b)| *a.max(b)).collect()
        }))
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<(&Exponent, &C)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (eb, cb) = divisor.leading()?;
        let inv = cb.inverse()?;
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        let (amin, amax) = (self.min_exponents()?, self.max_exponents()?);
        let (bmin, bmax) = (divisor.min_exponents()?, divisor.max_exponents()?);
        let lo: Vec<i32> = amin.iter().zip(&bmin).map(|(a, b)| a - b).collect();
        let hi: Vec<i32> = amax.iter().zip(&bmax).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((er, cr)) = rem.leading() {
            let e: Exponent = er.iter().zip(eb).map(|(a, b)| a - b).collect();
            if e.iter()
                .zip(lo.iter().zip(&hi))
                .any(|(x, (l, h))| x < l || x > h)
            {
                return None;
            }
            let c = cr.times(&inv);
            let step = divisor.shift(&e).scale(&c);
            rem = rem.sub(&step);
            quot.add_term(e, &c);
        }
        Some(quot)
    }

    /// Strict variant of [`div_exact`](Self::div_exact).
    pub fn divide(&self, divisor: &Self) -> Result<Self> {
        self.div_exact(divisor).ok_or(Error::NotDivisible)
    }

    /// Factors out the unit: minimal exponents shifted to zero and the leading
    /// coefficient scaled to one.
    pub fn unit_normalize(&self) -> Result<UnitNormalForm<C>> {
        let mins = self.min_exponents().ok_or(Error::ZeroPolynomial)?;
        let neg: Vec<i32> = mins.iter().map(|m| -m).collect();
        let shifted = self.shift(&neg);
        let lead = shifted.leading().unwrap().1.clone();
        let inv = lead.inverse().ok_or(Error::ZeroInverse)?;
        Ok(UnitNormalForm {
            normalized: shifted.scale(&inv),
            unit_monomial: mins,
            unit_scalar: lead,
        })
    }

    /// Value at an arbitrary complex point.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex64::new(c.to_f64(), 0.0);
            for (zj, &k) in z.iter().zip(e) {
                m *= zj.powi(k);
            }
            acc += m;
        }
        acc
    }

    /// Value at `z_j = e^{2πi t_j}`.
    pub fn eval_on_torus(&self, t: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let phase: f64 = e.iter().zip(t).map(|(&k, tj)| k as f64 * tj).sum();
            acc += Complex64::from_polar(c.to_f64(), std::f64::consts::TAU * phase.rem_euclid(1.0));
        }
        acc
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        let mut out = LaurentPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    pub fn to_f64(&self) -> LaurentPoly<f64> {
        self.map_coefficients(|c| c.to_f64())
    }

    /// Substitutes `z_j -> z_j^{-1}` in every variable.
    pub fn reflect(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|x| -x).collect(), c.clone()))
                .collect(),
        }
    }

    /// Renders with explicit variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let (neg, abs, _) = c.render();
            let mono = monomial_text(e, names);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (mono.is_empty(), abs == "1") {
                (true, _) => out.push_str(&abs),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&abs);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }

    pub fn parse(input: &str, nvars: usize) -> Result<Self> {
        super::parse::parse_polynomial(input, &variable_names(nvars))
    }
}

impl LaurentPoly<f64> {
    /// Drops coefficients with magnitude at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn monomial_text(e: &[i32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (k, name) in e.iter().zip(names) {
        match *k {
            0 => {}
            1 => parts.push(name.clone()),
            k if k < 0 => parts.push(format!("{}^({})", name, k)),
            k => parts.push(format!("{}^{}", name, k)),
        }
    }
    parts.join("*")
}

impl<C: Coefficient> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&variable_names(self.nvars)))
    }
}

impl<C: Coefficient> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self)
    }
}

/// Linear factor families recognised when printing crystal polynomials:
/// `z_j + 1`, `z_j - 1`, then `z_i - z_j` and `z_i + z_j` for `i < j`.
pub fn linear_factor_candidates<C: Coefficient>(nvars: usize) -> Vec<LaurentPoly<C>> {
    let one = LaurentPoly::<C>::one(nvars);
    let mut out = Vec::new();
    for j in 0..nvars {
        let z = LaurentPoly::variable(nvars, j);
        out.push(z.add(&one));
        out.push(z.sub(&one));
    }
    for i in 0..nvars {
        for j in i + 1..nvars {
            let a = LaurentPoly::variable(nvars, i);
            let b = LaurentPoly::variable(nvars, j);
            out.push(a.sub(&b));
            out.push(a.add(&b));
        }
    }
    out
}

/// Repeatedly divides out the candidate linear factors. Returns the factors with
/// multiplicities and the cofactor left over.
pub fn split_linear_factors<C: Coefficient>(
    p: &LaurentPoly<C>,
) -> (Vec<(LaurentPoly<C>, u32)>, LaurentPoly<C>) {
    let mut rest = p.clone();
    let mut found = Vec::new();
    if p.is_zero() {
        return (found, rest);
    }
    for cand in linear_factor_candidates::<C>(p.nvars()) {
        let mut k = 0;
        while let Some(q) = rest.div_exact(&cand) {
            if q.is_zero() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            found.push((cand, k));
        }
    }
    (found, rest)
}

/// Compact factored text such as `(z+1)(z-1)^3`, with any non-unit cofactor
/// appended in parentheses.
pub fn factored_display<C: Coefficient>(p: &LaurentPoly<C>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let (factors, rest) = split_linear_factors(p);
    let names = variable_names(p.nvars());
    let mut out = String::new();
    for (f, k) in &factors {
        let text = f.display_with(&names).replace(' ', "");
        out.push_str(&format!("({})", text));
        if *k > 1 {
            out.push_str(&format!("^{}", k));
        }
    }
    let is_unit = rest.len() == 1;
    if !is_unit || out.is_empty() {
        let r = match rest.unit_normalize() {
            Ok(n) => n.normalized,
            Err(_) => rest,
        };
        out.push_str(&format!("({})", r.display_with(&names)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exact::rat;

    type P = LaurentPoly<ExactReal>;

    fn p(s: &str) -> P {
        P::parse(s, 2).unwrap()
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p("z - 1");
        let b = p("w - 1");
        assert_eq!(a.mul(&b), p("z*w - z - w + 1"));
        assert_eq!(p("z^-1*z"), p("1"));
        assert_eq!(p("(z-1)^2").to_string(), "z^2 - 2*z + 1");
        let q = p("1/2*sqrt(3)*w^(-1) - (1 + sqrt(2))*z");
        assert_eq!(P::parse(&q.to_string(), 2).unwrap(), q);
    }

    #[test]
    fn torus_evaluation() {
        let v = P::parse("z - 1", 1).unwrap().eval_on_torus(&[0.5]);
        assert!((v - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        let v = P::parse("z^-1", 1).unwrap().eval_on_torus(&[0.25]);
        assert!((v - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        let rh = p("(z-1)*(w-1)*(z-w)");
        assert!(rh.eval_on_torus(&[1.0 / 3.0, 1.0 / 3.0]).norm() < 1e-12);
    }

    #[test]
    fn unit_normal_forms() {
        let n = p("-z^-1*w*(z-1)").unit_normalize().unwrap();
        assert_eq!(n.normalized, p("z - 1"));
        assert_eq!(n.unit_monomial, vec![-1, 1]);
        assert_eq!(n.unit_scalar, ExactReal::from_integer(-1));

        let n = p("z - 1").unit_normalize().unwrap();
        assert!(n.is_trivial_unit());
        assert_eq!(n.normalized, p("z-1"));

        let n = p("sqrt(3)*(w-1)").unit_normalize().unwrap();
        assert_eq!(n.unit_scalar, ExactReal::sqrt(3));
        assert_eq!(n.normalized, p("w - 1"));

        assert_eq!(P::zero(2).unit_normalize(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn exact_division() {
        let a = p("(z-1)^3*(z+1)*w^-1");
        let q = a.div_exact(&p("z-1")).unwrap();
        assert_eq!(q, p("(z-1)^2*(z+1)*w^-1"));
        assert!(a.div_exact(&p("w-1")).is_none());
        assert!(p("z^2 + 1").div_exact(&p("z - 1")).is_none());
        let s = p("(2 + sqrt(3))*(z - w)");
        assert_eq!(
            s.div_exact(&p("z-w")).unwrap().as_constant().unwrap(),
            "2 + sqrt(3)".parse().unwrap()
        );
    }

    #[test]
    fn factored_text() {
        let a = p("-3*z^-4*(z+1)*(z-1)^3");
        let n = a.unit_normalize().unwrap().normalized;
        assert_eq!(factored_display(&n), "(z+1)(z-1)^3");
        assert_eq!(factored_display(&p("(z-1)*(w-1)*(z-w)")), "(z-1)(w-1)(z-w)");
        assert_eq!(factored_display(&p("z^2+w+3")), "(z^2 + w + 3)");
        assert_eq!(
            factored_display(&p("(z-1)*(z^2+w+3)")),
            "(z-1)(z^2 + w + 3)"
        );
    }

    #[test]
    fn float_coefficients() {
        let a: LaurentPoly<f64> = LaurentPoly::parse("0.5*z - 2", 1).unwrap();
        assert_eq!(a.coefficient(&[1]), 0.5);
        assert_eq!(a.leading().unwrap().1, &0.5);
        let small = a.add(&LaurentPoly::monomial(vec![3], 1e-15)).prune(1e-12);
        assert_eq!(small, a);
        let r = P::from_terms(1, [(vec![0], ExactReal::from_rational(rat(1, 3)))]).to_f64();
        assert!((r.coefficient(&[0]) - 1.0 / 3.0).abs() < 1e-16);
    }
}
