//! Crystal polynomials, factorization checks and local-flex detection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    factored_display, interpolate_determinant, laurent_determinant, linear_factor_candidates,
    parse_polynomial, variable_names, ExactReal, LaurentPoly, UnitNormalForm,
};
use crate::error::Result;
use crate::framework::{CoefficientMode, CrystalFramework};
use crate::symbol::build_symbol;

/// Number of torus points used by floating identity tests.
pub const IDENTITY_SAMPLES: usize = 200;
pub const IDENTITY_SEED: u64 = 0x5eed_0fc0_ffee;
pub const IDENTITY_TOL: f64 = 1e-8;

/// `det Φ(z)` of a Maxwell framework, kept up to unit.
#[derive(Clone, Debug, PartialEq)]
pub enum CrystalPolynomial {
    Exact {
        determinant: LaurentPoly<ExactReal>,
        normal: Option<UnitNormalForm<ExactReal>>,
    },
    Floating {
        determinant: LaurentPoly<f64>,
        normal: Option<UnitNormalForm<f64>>,
    },
}

impl CrystalPolynomial {
    pub fn nvars(&self) -> usize {
        match self {
            CrystalPolynomial::Exact { determinant, .. } => determinant.nvars(),
            CrystalPolynomial::Floating { determinant, .. } => determinant.nvars(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CrystalPolynomial::Exact { normal, .. } => normal.is_none(),
            CrystalPolynomial::Floating { normal, .. } => normal.is_none(),
        }
    }

    pub fn normalized_exact(&self) -> Option<&LaurentPoly<ExactReal>> {
        match self {
            CrystalPolynomial::Exact {
                normal: Some(n), ..
            } => Some(&n.normalized),
            _ => None,
        }
    }

    /// Unit-normalized polynomial with floating coefficients.
    pub fn normalized_f64(&self) -> Option<LaurentPoly<f64>> {
        match self {
            CrystalPolynomial::Exact { normal, .. } => {
                normal.as_ref().map(|n| n.normalized.to_f64())
            }
            CrystalPolynomial::Floating { normal, .. } => {
                normal.as_ref().map(|n| n.normalized.clone())
            }
        }
    }

    /// Factored text of the normalized polynomial, e.g. `(z+1)(z-1)^3`.
    pub fn factored(&self) -> String {
        match self {
            CrystalPolynomial::Exact {
                normal: Some(n), ..
            } => factored_display(&n.normalized),
            CrystalPolynomial::Floating {
                normal: Some(n), ..
            } => approximate_factored(&n.normalized),
            _ => "0".to_string(),
        }
    }

    /// Expanded text of the normalized polynomial.
    pub fn expanded(&self) -> String {
        let names = variable_names(self.nvars());
        match self {
            CrystalPolynomial::Exact {
                normal: Some(n), ..
            } => n.normalized.display_with(&names),
            CrystalPolynomial::Floating {
                normal: Some(n), ..
            } => n.normalized.display_with(&names),
            _ => "0".to_string(),
        }
    }
}

pub fn crystal_polynomial(c: &CrystalFramework) -> Result<CrystalPolynomial> {
    c.require_maxwell()?;
    let s = build_symbol(c);
    match s.exact_entries() {
        Some(m) => {
            let det = laurent_determinant(m, c.dim())?;
            let normal = if det.is_zero() {
                None
            } else {
                Some(det.unit_normalize()?)
            };
            Ok(CrystalPolynomial::Exact {
                determinant: det,
                normal,
            })
        }
        None => {
            let det = interpolate_determinant(s.float_entries(), c.dim())?;
            let normal = if det.is_zero() {
                None
            } else {
                Some(det.unit_normalize()?)
            };
            Ok(CrystalPolynomial::Floating {
                determinant: det,
                normal,
            })
        }
    }
}

/// Quotient up to remainder terms below `tol`; floating analogue of `div_exact`.
fn approx_div(
    p: &LaurentPoly<f64>,
    divisor: &LaurentPoly<f64>,
    tol: f64,
) -> Option<LaurentPoly<f64>> {
    let (eb, cb) = divisor.leading()?;
    let (eb, cb) = (eb.clone(), *cb);
    let lo: Vec<i32> = p
        .min_exponents()?
        .iter()
        .zip(divisor.min_exponents()?)
        .map(|(a, b)| a - b)
        .collect();
    let hi: Vec<i32> = p
        .max_exponents()?
        .iter()
        .zip(divisor.max_exponents()?)
        .map(|(a, b)| a - b)
        .collect();
    let mut rem = p.clone();
    let mut quot = LaurentPoly::zero(p.nvars());
    while let Some((er, cr)) = rem.leading() {
        let e: Vec<i32> = er.iter().zip(&eb).map(|(a, b)| a - b).collect();
        if e.iter()
            .zip(lo.iter().zip(&hi))
            .any(|(x, (l, h))| x < l || x > h)
        {
            return None;
        }
        let term = LaurentPoly::monomial(e, cr / cb);
        rem = rem.sub(&divisor.mul(&term)).prune(tol);
        quot = quot.add(&term);
    }
    Some(quot)
}

fn approximate_factored(p: &LaurentPoly<f64>) -> String {
    let tol = 1e-9 * p.max_abs_coefficient().max(1.0);
    let names = variable_names(p.nvars());
    let mut rest = p.clone();
    let mut out = String::new();
    for cand in linear_factor_candidates::<f64>(p.nvars()) {
        let mut k = 0;
        while let Some(q) = approx_div(&rest, &cand, tol) {
            if q.is_zero() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            out.push_str(&format!("({})", cand.display_with(&names).replace(' ', "")));
            if k > 1 {
                out.push_str(&format!("^{}", k));
            }
        }
    }
    if rest.len() != 1 || out.is_empty() {
        out.push_str(&format!("({})", rest.display_with(&names)));
    }
    out
}

/// Fixed-seed pseudo-random points of `[0,1)^d`.
pub fn identity_points(d: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(IDENTITY_SEED);
    (0..IDENTITY_SAMPLES)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationCheck {
    pub matches: bool,
    /// Largest `|p(ω) − Π f(ω)|` over the sample points, both sides unit-normalized.
    pub max_deviation: f64,
    pub scale: f64,
    pub mode: CoefficientMode,
}

/// Parses factor strings; `z, w` and `z1..zd` are accepted as variable names.
pub fn parse_factors<C: crate::algebra::Coefficient>(
    factors: &[String],
    d: usize,
) -> Result<Vec<LaurentPoly<C>>> {
    let names = variable_names(d);
    factors
        .iter()
        .map(|f| parse_polynomial::<C>(f, &names))
        .collect()
}

pub fn verify_factorization(
    c: &CrystalFramework,
    factors: &[String],
) -> Result<FactorizationCheck> {
    let poly = crystal_polynomial(c)?;
    let d = c.dim();
    let mode = c.mode();
    let points = identity_points(d);
    let product_f64 = parse_factors::<f64>(factors, d)?
        .into_iter()
        .fold(LaurentPoly::one(d), |acc, f| acc.mul(&f));
    let product_normal = if product_f64.is_zero() {
        None
    } else {
        Some(product_f64.unit_normalize()?.normalized)
    };
    let det = poly.normalized_f64();
    let (max_deviation, scale) = deviation(det.as_ref(), product_normal.as_ref(), &points);
    let matches = match (&poly, mode) {
        (CrystalPolynomial::Exact { normal, .. }, CoefficientMode::Exact) => {
            let product = parse_factors::<ExactReal>(factors, d)?
                .into_iter()
                .fold(LaurentPoly::one(d), |acc, f| acc.mul(&f));
            match normal {
                None => product.is_zero(),
                Some(n) => {
                    !product.is_zero() && product.unit_normalize()?.normalized == n.normalized
                }
            }
        }
        _ => max_deviation <= IDENTITY_TOL * scale,
    };
    Ok(FactorizationCheck {
        matches,
        max_deviation,
        scale,
        mode,
    })
}

fn deviation(
    a: Option<&LaurentPoly<f64>>,
    b: Option<&LaurentPoly<f64>>,
    points: &[Vec<f64>],
) -> (f64, f64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for t in points {
        let x = a.map_or(zero, |p| p.eval_on_torus(t));
        let y = b.map_or(zero, |p| p.eval_on_torus(t));
        dev = dev.max((x - y).norm());
        scale = scale.max(y.norm());
    }
    (dev, scale)
}

/// Local flexes exist iff the crystal polynomial vanishes identically.
pub fn has_local_flex(c: &CrystalFramework) -> Result<bool> {
    c.require_maxwell()?;
    match c.mode() {
        CoefficientMode::Exact => Ok(crystal_polynomial(c)?.is_zero()),
        CoefficientMode::Floating => {
            let s = build_symbol(c);
            Ok(identity_points(c.dim()).iter().all(|t| {
                let m = s.eval_f64(t, true);
                m.determinant().norm() <= IDENTITY_TOL
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::framework::document::parse_framework;

    const RHOMBIC: &str = r#"{
        "dimension": 2,
        "basis": [["1", "0"], ["1/2", "1 + 1/2*sqrt(3)"]],
        "vertices": {"v0": ["0", "0"], "v1": ["1/2", "1/2*sqrt(3)"], "v2": ["0", "1"]},
        "edges": [
            {"v": "v0", "lv": [0, 0], "w": "v1", "lw": [0, 0]},
            {"v": "v0", "lv": [0, 0], "w": "v2", "lw": [0, 0]},
            {"v": "v0", "lv": [0, 1], "w": "v2", "lw": [0, 0]},
            {"v": "v0", "lv": [0, 1], "w": "v1", "lw": [0, 0]},
            {"v": "v0", "lv": [0, 0], "w": "v2", "lw": [1, -1]},
            {"v": "v0", "lv": [1, 0], "w": "v1", "lw": [0, 0]}
        ]
    }"#;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rhombic_factors() {
        let c = parse_framework(RHOMBIC).unwrap();
        let p = crystal_polynomial(&c).unwrap();
        assert_eq!(p.factored(), "(z-1)(w-1)(z-w)");
        assert!(
            verify_factorization(&c, &strings(&["z-1", "w-1", "z-w"]))
                .unwrap()
                .matches
        );
        assert!(
            !verify_factorization(&c, &strings(&["z-1", "w-1", "z+w"]))
                .unwrap()
                .matches
        );
        assert!(!has_local_flex(&c).unwrap());
    }

    #[test]
    fn floating_path_agrees() {
        let exact = parse_framework(RHOMBIC).unwrap();
        let mut doc = crate::framework::document::FrameworkDocument::from_framework(&exact);
        doc.mode = "floating".into();
        let g = exact.geometry_f64();
        doc.basis = g
            .basis
            .iter()
            .map(|r| r.iter().map(|x| serde_json::json!(x)).collect())
            .collect();
        for (i, (_, p)) in doc.vertices.0.iter_mut().enumerate() {
            *p = g.positions[i]
                .iter()
                .map(|x| serde_json::json!(x))
                .collect();
        }
        let c = doc.to_framework().unwrap();
        let check = verify_factorization(&c, &strings(&["z-1", "w-1", "z-w"])).unwrap();
        assert!(check.matches, "{:?}", check);
        assert!(
            !verify_factorization(&c, &strings(&["z-1", "w-1", "z+w"]))
                .unwrap()
                .matches
        );
        assert!(!has_local_flex(&c).unwrap());
        assert_eq!(
            crystal_polynomial(&c).unwrap().factored(),
            "(z-1)(w-1)(z-w)"
        );
    }

    #[test]
    fn not_maxwell() {
        let tri = r#"{"dimension": 2, "basis": [["1","0"],["1/2","1/2*sqrt(3)"]],
            "vertices": {"v": ["0","0"]},
            "edges": [{"v":"v","lv":[0,0],"w":"v","lw":[1,0]},{"v":"v","lv":[1,0],"w":"v","lw":[0,1]},
                      {"v":"v","lv":[0,0],"w":"v","lw":[0,1]}]}"#;
        let c = parse_framework(tri).unwrap();
        assert!(matches!(
            crystal_polynomial(&c),
            Err(Error::NotMaxwell { .. })
        ));
        assert!(matches!(has_local_flex(&c), Err(Error::NotMaxwell { .. })));
    }
}
