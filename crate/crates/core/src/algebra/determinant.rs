//! Determinants of square matrices over the Laurent ring.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::laurent::{Coefficient, LaurentPoly};
use crate::error::{Error, Result};

pub type PolyMatrix<C> = Vec<Vec<LaurentPoly<C>>>;

pub const MAX_DETERMINANT_SIZE: usize = 24;

fn check_square<C>(m: &PolyMatrix<C>) -> Result<usize> {
    let n = square_size(m)?;
    if n > MAX_DETERMINANT_SIZE {
        return Err(Error::MatrixTooLarge(n));
    }
    Ok(n)
}

fn square_size<C>(m: &PolyMatrix<C>) -> Result<usize> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
    }
    Ok(n)
}

/// Exact determinant by fraction-free elimination, falling back to the
/// cofactor expansion if a Bareiss division is ever inexact.
pub fn laurent_determinant<C: Coefficient>(
    m: &PolyMatrix<C>,
    nvars: usize,
) -> Result<LaurentPoly<C>> {
    check_square(m)?;
    match bareiss(m, nvars)? {
        Some(d) => Ok(d),
        None => cofactor_determinant(m, nvars),
    }
}

/// Bareiss elimination. Pivots are chosen with the fewest monomials, lowest row
/// first. Returns `None` if a division step is not exact.
pub fn bareiss<C: Coefficient>(m: &PolyMatrix<C>, nvars: usize) -> Result<Option<LaurentPoly<C>>> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Some(LaurentPoly::one(nvars)));
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = LaurentPoly::one(nvars);
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| (a[i][k].len(), i));
        let Some(p) = pivot else {
            return Ok(Some(LaurentPoly::zero(nvars)));
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let lead = std::mem::replace(&mut row[k], LaurentPoly::zero(nvars));
            for j in k + 1..n {
                let mut num = row[j].mul(&pivot_row[k]);
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    num = num.sub(&lead.mul(&pivot_row[j]));
                }
                row[j] = if k == 0 {
                    num
                } else {
                    match num.div_exact(&prev) {
                        Some(q) => q,
                        None => return Ok(None),
                    }
                };
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(Some(if negate { det.neg() } else { det }))
}

/// Permutation expansion organised by column subsets: after placing rows
/// `0..r`, the state is the set of used columns.
pub fn cofactor_determinant<C: Coefficient>(
    m: &PolyMatrix<C>,
    nvars: usize,
) -> Result<LaurentPoly<C>> {
    let n = check_square(m)?;
    let mut layer: HashMap<u32, LaurentPoly<C>> = HashMap::new();
    layer.insert(0, LaurentPoly::one(nvars));
    for (r, row) in m.iter().enumerate() {
        let mut next: HashMap<u32, LaurentPoly<C>> = HashMap::with_capacity(layer.len() * (n - r));
        for (mask, acc) in &layer {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let mut term = acc.mul(entry);
                if above % 2 == 1 {
                    term = term.neg();
                }
                let key = mask | (1 << c);
                match next.get_mut(&key) {
                    Some(v) => *v = v.add(&term),
                    None => {
                        next.insert(key, term);
                    }
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        layer = next;
        if layer.is_empty() {
            return Ok(LaurentPoly::zero(nvars));
        }
    }
    Ok(layer
        .remove(&((1u64 << n) as u32).wrapping_sub(1))
        .unwrap_or_else(|| LaurentPoly::zero(nvars)))
}

/// Determinant of a floating-coefficient matrix, recovered by evaluating on a
/// grid of roots of unity sized by per-row exponent ranges and inverting the DFT.
/// Coefficients below `1e-10` of the largest are dropped.
pub fn interpolate_determinant(m: &PolyMatrix<f64>, nvars: usize) -> Result<LaurentPoly<f64>> {
    let n = square_size(m)?;
    if n == 0 {
        return Ok(LaurentPoly::one(nvars));
    }
    let mut shift = vec![0i32; nvars];
    let mut degree = vec![0usize; nvars];
    for row in m {
        let mut lo = vec![i32::MAX; nvars];
        let mut hi = vec![i32::MIN; nvars];
        for entry in row {
            if let (Some(a), Some(b)) = (entry.min_exponents(), entry.max_exponents()) {
                for j in 0..nvars {
                    lo[j] = lo[j].min(a[j]);
                    hi[j] = hi[j].max(b[j]);
                }
            }
        }
        if lo[0] == i32::MAX {
            return Ok(LaurentPoly::zero(nvars));
        }
        for j in 0..nvars {
            shift[j] += lo[j];
            degree[j] += (hi[j] - lo[j]) as usize;
        }
    }
    let sizes: Vec<usize> = degree.iter().map(|d| d + 1).collect();
    let total: usize = sizes.iter().product();
    let index = |mut flat: usize| -> Vec<usize> {
        let mut idx = vec![0; nvars];
        for j in (0..nvars).rev() {
            idx[j] = flat % sizes[j];
            flat /= sizes[j];
        }
        idx
    };
    let mut values = Vec::with_capacity(total);
    for flat in 0..total {
        let idx = index(flat);
        let t: Vec<f64> = idx
            .iter()
            .zip(&sizes)
            .map(|(&i, &s)| i as f64 / s as f64)
            .collect();
        let mat = DMatrix::from_fn(n, n, |i, j| m[i][j].eval_on_torus(&t));
        let s: f64 = shift.iter().zip(&t).map(|(&k, tj)| k as f64 * tj).sum();
        let unshift = Complex64::from_polar(1.0, -std::f64::consts::TAU * s);
        values.push(mat.determinant() * unshift);
    }
    let mut coeffs = Vec::with_capacity(total);
    for flat in 0..total {
        let e = index(flat);
        let mut acc = Complex64::new(0.0, 0.0);
        for (g, v) in values.iter().enumerate() {
            let idx = index(g);
            let phase: f64 = e
                .iter()
                .zip(&idx)
                .zip(&sizes)
                .map(|((&a, &b), &s)| ((a * b) % s) as f64 / s as f64)
                .sum();
            acc += v * Complex64::from_polar(1.0, -std::f64::consts::TAU * phase);
        }
        let exp: Vec<i32> = e.iter().zip(&shift).map(|(&a, &s)| a as i32 + s).collect();
        coeffs.push((exp, acc.re / total as f64));
    }
    let p = LaurentPoly::from_terms(nvars, coeffs);
    let scale = p.max_abs_coefficient();
    Ok(p.prune(1e-10 * scale))
}
