//! Fejér sequences, Bochner–Fejér product kernels and mean convolution.

use std::collections::HashMap;

use num_complex::Complex64;

use super::trig::{phase_key, FrequencyAtom, TrigField};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::phase::{Coord, Phase};

pub const DEFAULT_ATOM_LIMIT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FejerTerm {
    pub m: i64,
    /// `m·λ mod 1`.
    pub t: Coord,
    pub weight: f64,
}

/// `K_(n,λ) = Σ_{|m|≤n} (1 − |m|/(n+1)) e_{ω^m}`, `ω = e^{2πiλ}`.
pub fn fejer_sequence(n: usize, lambda: Coord) -> Vec<FejerTerm> {
    let n = n as i64;
    (-n..=n)
        .map(|m| FejerTerm {
            m,
            t: lambda.scaled(m),
            weight: 1.0 - m.abs() as f64 / (n + 1) as f64,
        })
        .collect()
}

pub fn fejer_value(terms: &[FejerTerm], k: i64) -> Complex64 {
    terms
        .iter()
        .map(|f| crate::phase::turn(f.t.scaled(k)) * f.weight)
        .sum()
}

/// One Fejér factor acting on a single torus axis.
#[derive(Clone, Debug, PartialEq)]
pub struct FejerFactor {
    pub axis: usize,
    pub order: usize,
    pub lambda: Coord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FejerKernelSpec {
    pub dim: usize,
    pub factors: Vec<FejerFactor>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    pub atom_limit: usize,
    /// Caps `n·n! − 1` when set.
    pub max_order: Option<usize>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            atom_limit: DEFAULT_ATOM_LIMIT,
            max_order: None,
        }
    }
}

fn factorial(n: usize) -> Option<i64> {
    (1..=n as i64).try_fold(1i64, |acc, x| acc.checked_mul(x))
}

/// Stage `n` factors: order `n·n! − 1` (at least 1) and frequency `α_j/n!`
/// on every axis `j` for each of the first `n` bases.
pub fn stage_spec(bases: &[Phase], n: usize, config: &KernelConfig) -> Result<FejerKernelSpec> {
    if n == 0 {
        return Err(Error::Invalid("kernel stage must be at least 1".into()));
    }
    let dim = bases.first().map(|b| b.dim()).unwrap_or(1);
    if bases.iter().any(|b| b.dim() != dim) {
        return Err(Error::Invalid(
            "base frequencies have different dimensions".into(),
        ));
    }
    let fact = factorial(n).ok_or(Error::StageTooLarge {
        atoms: u128::MAX,
        limit: config.atom_limit,
    })?;
    let mut order = (n as i64).saturating_mul(fact).saturating_sub(1).max(1) as usize;
    if let Some(cap) = config.max_order {
        order = order.min(cap.max(1));
    }
    let mut factors = Vec::new();
    for b in bases.iter().take(n) {
        for (axis, c) in b.coords().iter().enumerate() {
            factors.push(FejerFactor {
                axis,
                order,
                lambda: c.divided(fact),
            });
        }
    }
    Ok(FejerKernelSpec { dim, factors })
}

/// Expands the coordinatewise product of the factors into a scalar field.
pub fn expand_kernel(spec: &FejerKernelSpec, config: &KernelConfig) -> Result<TrigField> {
    let d = spec.dim;
    let mut current: Vec<(Phase, f64)> = vec![(Phase::zero(d), 1.0)];
    for f in &spec.factors {
        if f.axis >= d || f.order == 0 {
            return Err(Error::Invalid(format!("bad kernel factor {:?}", f)));
        }
        let terms = fejer_sequence(f.order, f.lambda);
        let bound = current.len() as u128 * terms.len() as u128;
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut next: Vec<(Phase, f64)> = Vec::new();
        for (t, w) in &current {
            for term in &terms {
                let mut p = t.clone();
                p.0[f.axis] = p.0[f.axis].plus(term.t);
                let key = phase_key(&p);
                match index.get(&key) {
                    Some(&i) => next[i].1 += w * term.weight,
                    None => {
                        if next.len() >= config.atom_limit {
                            return Err(Error::StageTooLarge {
                                atoms: bound,
                                limit: config.atom_limit,
                            });
                        }
                        index.insert(key, next.len());
                        next.push((p, w * term.weight));
                    }
                }
            }
        }
        current = next;
    }
    let atoms = current
        .into_iter()
        .map(|(t, w)| FrequencyAtom {
            t,
            a: CVector::from_element(1, Complex64::new(w, 0.0)),
        })
        .collect();
    TrigField::new(d, 1, atoms)
}

/// The stage-`n` Bochner–Fejér kernel for the given base frequencies.
pub fn bochner_fejer_kernel(bases: &[Phase], n: usize, config: &KernelConfig) -> Result<TrigField> {
    expand_kernel(&stage_spec(bases, n, config)?, config)
}

/// `g(k) = [h, R_k K]`: each atom of `h` scaled by the conjugate weight of its frequency in `K`.
pub fn mean_convolution(h: &TrigField, kernel: &TrigField) -> Result<TrigField> {
    if kernel.width() != 1 {
        return Err(Error::Invalid("the kernel must be scalar valued".into()));
    }
    if kernel.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: kernel.dim(),
        });
    }
    let weights: HashMap<Vec<i64>, Complex64> = kernel
        .atoms()
        .iter()
        .map(|a| (phase_key(&a.t), a.a[0]))
        .collect();
    let atoms = h
        .atoms()
        .iter()
        .filter_map(|a| {
            weights.get(&phase_key(&a.t)).map(|w| FrequencyAtom {
                t: a.t.clone(),
                a: &a.a * w.conj(),
            })
        })
        .collect();
    TrigField::new(h.dim(), h.width(), atoms)
}
