//! Finite sums `g = Σ a_ω ⊗ e_ω` of phase-periodic fields.

use std::collections::HashMap;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::phase::{Coord, Phase};
use crate::symbol::VelocityField;

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyAtom {
    pub t: Phase,
    pub a: CVector,
}

/// Atoms have pairwise distinct phases and nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigField {
    dim: usize,
    width: usize,
    atoms: Vec<FrequencyAtom>,
}

const KEY_SCALE: f64 = 1e12;

/// Hash key identifying phases that agree to about `1e-12` per axis.
pub(crate) fn phase_key(t: &Phase) -> Vec<i64> {
    let m = KEY_SCALE as i64;
    t.coords()
        .iter()
        .map(|c| ((c.wrapped().to_f64() * KEY_SCALE).round() as i64).rem_euclid(m))
        .collect()
}

impl TrigField {
    /// Merges atoms sharing a phase and drops those whose coefficients cancel.
    pub fn new(dim: usize, width: usize, atoms: Vec<FrequencyAtom>) -> Result<Self> {
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut merged: Vec<FrequencyAtom> = Vec::new();
        for atom in atoms {
            if atom.t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: atom.t.dim(),
                });
            }
            if atom.a.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: atom.a.len(),
                });
            }
            let t = Phase(atom.t.0.iter().map(|c| c.wrapped()).collect());
            match index.get(&phase_key(&t)) {
                Some(&i) => merged[i].a += atom.a,
                None => {
                    index.insert(phase_key(&t), merged.len());
                    merged.push(FrequencyAtom { t, a: atom.a });
                }
            }
        }
        merged.retain(|a| a.a.iter().any(|x| *x != Complex64::new(0.0, 0.0)));
        Ok(TrigField {
            dim,
            width,
            atoms: merged,
        })
    }

    pub fn scalar(dim: usize, terms: Vec<(Phase, Complex64)>) -> Result<Self> {
        let atoms = terms
            .into_iter()
            .map(|(t, c)| FrequencyAtom {
                t,
                a: CVector::from_element(1, c),
            })
            .collect();
        Self::new(dim, 1, atoms)
    }

    /// The pure frequency `e_ω`.
    pub fn pure(t: Phase) -> Self {
        let d = t.dim();
        Self::scalar(d, vec![(t, Complex64::new(1.0, 0.0))]).expect("one atom")
    }

    pub fn single(t: Phase, a: CVector) -> Result<Self> {
        let (d, w) = (t.dim(), a.len());
        Self::new(d, w, vec![FrequencyAtom { t, a }])
    }

    pub fn zero(dim: usize, width: usize) -> Self {
        TrigField {
            dim,
            width,
            atoms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Length of each coefficient vector: `d|F_v|` for velocity fields, 1 for scalars.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn atoms(&self) -> &[FrequencyAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn coefficient(&self, t: &Phase) -> Option<&CVector> {
        self.atoms.iter().find(|a| a.t.same_as(t)).map(|a| &a.a)
    }

    /// `Σ ω^k a_ω`.
    pub fn value(&self, k: &[i64]) -> CVector {
        let mut out = CVector::zeros(self.width);
        for atom in &self.atoms {
            out += &atom.a * atom.t.character(k);
        }
        out
    }

    /// Velocity at vertex copy `(v, k)`.
    pub fn eval(&self, k: &[i64], v: usize) -> Vec<Complex64> {
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for atom in &self.atoms {
            let w = atom.t.character(k);
            for (i, x) in out.iter_mut().enumerate() {
                *x += w * atom.a[v * d + i];
            }
        }
        out
    }

    pub fn eval_scalar(&self, k: &[i64]) -> Complex64 {
        self.atoms.iter().map(|a| a.a[0] * a.t.character(k)).sum()
    }

    /// Sampler for patch residual computations.
    pub fn velocity(&self) -> impl Fn(usize, &[i64]) -> Option<Vec<Complex64>> + '_ {
        move |v, k| {
            if (v + 1) * self.dim > self.width {
                return None;
            }
            Some(self.eval(k, v))
        }
    }

    /// `Σ ‖a_ω‖`.
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.a.norm()).sum()
    }

    pub fn scaled(&self, c: Complex64) -> TrigField {
        let atoms = self
            .atoms
            .iter()
            .map(|a| FrequencyAtom {
                t: a.t.clone(),
                a: &a.a * c,
            })
            .collect();
        TrigField::new(self.dim, self.width, atoms).expect("same shape")
    }

    pub fn add(&self, other: &TrigField) -> Result<TrigField> {
        if (self.dim, self.width) != (other.dim, other.width) {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        TrigField::new(self.dim, self.width, atoms)
    }

    /// Right shift `(R_l g)(k) = g(k − l)`.
    pub fn shifted(&self, l: &[i64]) -> TrigField {
        let neg: Vec<i64> = l.iter().map(|x| -x).collect();
        let atoms = self
            .atoms
            .iter()
            .map(|a| FrequencyAtom {
                t: a.t.clone(),
                a: &a.a * a.t.character(&neg),
            })
            .collect();
        TrigField::new(self.dim, self.width, atoms).expect("same shape")
    }

    /// True when `g(k + n) = g(k)` for all `k`, i.e. `n·t ∈ Z` for every atom.
    pub fn invariant_under(&self, n: &[i64]) -> bool {
        self.atoms
            .iter()
            .all(|a| a.t.dot(n).wrap_distance() <= 1e-12)
    }

    /// Smallest period `m ≤ max` along each axis, if any.
    pub fn axis_periods(&self, max: i64) -> Vec<Option<i64>> {
        (0..self.dim)
            .map(|j| {
                (1..=max).find(|&m| {
                    let mut n = vec![0; self.dim];
                    n[j] = m;
                    self.invariant_under(&n)
                })
            })
            .collect()
    }

    /// Parses `[{"t": ["1/3", "0"], "a": [[re, im], ...]}, ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let items = v
            .as_array()
            .ok_or_else(|| Error::Schema("expected a list of atoms".into()))?;
        let mut atoms = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let t = item
                .get("t")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Schema(format!("atom {}: missing `t`", i)))?
                .iter()
                .map(parse_coord)
                .collect::<Result<Vec<_>>>()?;
            let a = item
                .get("a")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Schema(format!("atom {}: missing `a`", i)))?
                .iter()
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            atoms.push(FrequencyAtom {
                t: Phase(t),
                a: CVector::from_vec(a),
            });
        }
        let first = atoms
            .first()
            .ok_or_else(|| Error::Schema("a field needs at least one atom".into()))?;
        let (d, w) = (first.t.dim(), first.a.len());
        TrigField::new(d, w, atoms)
    }

    pub fn to_json(&self) -> String {
        let items: Vec<Value> = self
            .atoms
            .iter()
            .map(|a| {
                serde_json::json!({
                    "t": a.t.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "a": a.a.iter().map(|x| [x.re, x.im]).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&Value::Array(items)).expect("serializable")
    }
}

fn parse_coord(v: &Value) -> Result<Coord> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Coord::ratio(i, 1)),
            None => Ok(Coord::Real(n.as_f64().unwrap_or(f64::NAN)).wrapped()),
        },
        _ => Err(Error::Schema(format!("bad phase coordinate {}", v))),
    }
}

fn parse_complex(v: &Value) -> Result<Complex64> {
    let num = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| Error::Schema(format!("bad number {}", x)))
    };
    match v {
        Value::Array(p) if p.len() == 2 => Ok(Complex64::new(num(&p[0])?, num(&p[1])?)),
        Value::Number(_) => Ok(Complex64::new(num(v)?, 0.0)),
        _ => Err(Error::Schema(format!("bad complex entry {}", v))),
    }
}

pub fn trig_eval(g: &TrigField, k: &[i64], v: usize) -> Vec<Complex64> {
    g.eval(k, v)
}

/// `[g, h]` computed by matching frequencies. Against a scalar `h` the result
/// has the width of `g`; for equal widths it is the single number `Σ a·c̄`.
pub fn mean_inner_product(g: &TrigField, h: &TrigField) -> Result<CVector> {
    if g.dim != h.dim {
        return Err(Error::DimensionMismatch {
            expected: g.dim,
            found: h.dim,
        });
    }
    let index: HashMap<Vec<i64>, &CVector> =
        h.atoms.iter().map(|a| (phase_key(&a.t), &a.a)).collect();
    if h.width == 1 {
        let mut out = CVector::zeros(g.width);
        for atom in &g.atoms {
            if let Some(c) = index.get(&phase_key(&atom.t)) {
                out += &atom.a * c[0].conj();
            }
        }
        Ok(out)
    } else if h.width == g.width {
        let mut s = Complex64::new(0.0, 0.0);
        for atom in &g.atoms {
            if let Some(c) = index.get(&phase_key(&atom.t)) {
                s += atom
                    .a
                    .iter()
                    .zip(c.iter())
                    .map(|(x, y)| x * y.conj())
                    .sum::<Complex64>();
            }
        }
        Ok(CVector::from_element(1, s))
    } else {
        Err(Error::DimensionMismatch {
            expected: g.width,
            found: h.width,
        })
    }
}

/// `[g, e_ω]`.
pub fn mean_against(g: &TrigField, t: &Phase) -> CVector {
    g.coefficient(t)
        .cloned()
        .unwrap_or_else(|| CVector::zeros(g.width))
}

#[derive(Clone, Debug)]
pub struct BohrSpectrumReport {
    pub threshold: f64,
    pub frequencies: Vec<Phase>,
    pub values: Vec<CVector>,
}

/// Atom phases whose coefficient norm reaches `threshold`.
pub fn bohr_spectrum(g: &TrigField, threshold: f64) -> Result<BohrSpectrumReport> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Invalid(format!(
            "threshold must be positive, got {}",
            threshold
        )));
    }
    let (frequencies, values) = g
        .atoms
        .iter()
        .filter(|a| a.a.norm() >= threshold)
        .map(|a| (a.t.clone(), a.a.clone()))
        .unzip();
    Ok(BohrSpectrumReport {
        threshold,
        frequencies,
        values,
    })
}

/// `(1/(N+1)^d) Σ_{0≤k_i≤N} ω̄^k u(k,·)` from samples, stacked over the motif.
pub fn extract_sampled(
    u: &VelocityField,
    num_vertices: usize,
    t: &Phase,
    n: usize,
) -> Result<CVector> {
    let d = t.dim();
    let conj = t.negated();
    let mut out = CVector::zeros(d * num_vertices);
    let mut count = 0usize;
    let mut k = vec![0i64; d];
    loop {
        let w = conj.character(&k);
        for v in 0..num_vertices {
            let val = u(v, &k).ok_or_else(|| Error::MissingSample {
                vertex: v,
                offset: k.clone(),
            })?;
            if val.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: val.len(),
                });
            }
            for (i, x) in val.iter().enumerate() {
                out[v * d + i] += w * x;
            }
        }
        count += 1;
        let mut j = 0;
        while j < d {
            k[j] += 1;
            if k[j] as usize <= n {
                break;
            }
            k[j] = 0;
            j += 1;
        }
        if j == d {
            break;
        }
    }
    Ok(out / Complex64::new(count as f64, 0.0))
}

/// `(1/(N+1)) Σ_{k=0}^{N} e^{2πi k δ}` in closed form.
fn geometric_mean(delta: Coord, n: usize) -> Complex64 {
    if delta.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let r = crate::phase::turn(delta);
    let rn = crate::phase::turn(delta.scaled(n as i64 + 1));
    (Complex64::new(1.0, 0.0) - rn) / ((Complex64::new(1.0, 0.0) - r) * (n as f64 + 1.0))
}

/// Averaging operator applied to a trigonometric field. With `n = None` this
/// is the limit, the coefficient `a_ω` itself.
pub fn phase_component_extract(g: &TrigField, t: &Phase, n: Option<usize>) -> Result<CVector> {
    if t.dim() != g.dim {
        return Err(Error::DimensionMismatch {
            expected: g.dim,
            found: t.dim(),
        });
    }
    let Some(n) = n else {
        return Ok(mean_against(g, t));
    };
    let mut out = CVector::zeros(g.width);
    for atom in &g.atoms {
        let f: Complex64 = atom
            .t
            .coords()
            .iter()
            .zip(t.coords())
            .map(|(a, b)| geometric_mean(a.plus(b.negated()), n))
            .product();
        out += &atom.a * f;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonTranslation {
    /// `max_v Σ ‖a_ω(v)‖·|ω^l − 1|`, an upper bound for `‖R_l u − u‖_∞`.
    pub bound: f64,
    /// `‖R_l u − u‖` maximised over the probe box.
    pub probe: f64,
    pub is_translation: bool,
    /// False when the probe stays below `ε` but the bound does not.
    pub certain: bool,
}

pub const PROBE_RADIUS: i64 = 4;

pub fn epsilon_translation_test(u: &TrigField, l: &[i64], eps: f64) -> Result<EpsilonTranslation> {
    let d = u.dim;
    if l.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: l.len(),
        });
    }
    let nv = (u.width / d.max(1)).max(1);
    let block = if u.width == 1 { 1 } else { d };
    let mut bound: f64 = 0.0;
    for v in 0..nv {
        let s: f64 = u
            .atoms
            .iter()
            .map(|a| {
                let part = a.a.rows(v * block, block).norm();
                part * (a.t.character(l) - Complex64::new(1.0, 0.0)).norm()
            })
            .sum();
        bound = bound.max(s);
    }
    let diff = u.shifted(l).add(&u.scaled(Complex64::new(-1.0, 0.0)))?;
    let mut probe: f64 = 0.0;
    for k in crate::framework::PatchSpec::cube(d, -PROBE_RADIUS, PROBE_RADIUS).points() {
        let val = diff.value(&k);
        for v in 0..nv {
            probe = probe.max(val.rows(v * block, block).norm());
        }
    }
    let is_translation = bound < eps;
    Ok(EpsilonTranslation {
        bound,
        probe,
        is_translation,
        certain: is_translation || probe >= eps,
    })
}
