//! Dense complex linear algebra: singular values, numerical rank, null spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Singular values and right singular vectors of a matrix, with the column
/// space fully resolved even for wide matrices.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// All `cols` singular values, descending (wide inputs contribute zeros).
    pub singular_values: Vec<f64>,
    /// Right singular vectors matching `singular_values`.
    pub right_vectors: Vec<CVector>,
}

pub fn decompose(m: &CMatrix) -> Decomposition {
    let (r, c) = m.shape();
    let padded = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    if c == 0 {
        return Decomposition {
            singular_values: Vec::new(),
            right_vectors: Vec::new(),
        };
    }
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let right_vectors = order
        .iter()
        .map(|&i| v_t.row(i).transpose().map(|x| x.conj()))
        .collect();
    Decomposition {
        singular_values,
        right_vectors,
    }
}

/// Threshold `τ·max(σ₁, 1)` below which a singular value counts as zero.
pub fn rank_threshold(singular_values: &[f64], tol: f64) -> f64 {
    tol * singular_values.first().copied().unwrap_or(0.0).max(1.0)
}

pub fn numerical_rank(singular_values: &[f64], tol: f64) -> usize {
    let th = rank_threshold(singular_values, tol);
    singular_values.iter().filter(|&&s| s > th).count()
}

/// Singular values only, all `cols` of them, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let c = m.ncols();
    let mut s: Vec<f64> = if c == 0 {
        Vec::new()
    } else {
        m.clone().singular_values().iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s.resize(c, 0.0);
    s
}

/// `‖A⁻¹‖_F` by Gauss–Jordan elimination with partial pivoting; `None` when a
/// pivot vanishes. `1/‖A⁻¹‖_F` is a lower bound for the smallest singular value.
pub fn inverse_frobenius(m: &CMatrix) -> Option<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix expected");
    let w = 2 * n;
    let mut a = vec![Complex64::new(0.0, 0.0); n * w];
    for i in 0..n {
        for j in 0..n {
            a[i * w + j] = m[(i, j)];
        }
        a[i * w + n + i] = Complex64::new(1.0, 0.0);
    }
    for k in 0..n {
        let (mut p, mut best) = (k, 0.0);
        for i in k..n {
            let v = a[i * w + k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..w {
                a.swap(k * w + j, p * w + j);
            }
        }
        let inv = a[k * w + k].inv();
        for j in k..w {
            a[k * w + j] *= inv;
        }
        let (head, tail) = a.split_at_mut(k * w);
        let (pivot_row, rest) = tail.split_at_mut(w);
        for row in head.chunks_exact_mut(w).chain(rest.chunks_exact_mut(w)) {
            let f = row[k];
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for j in k..w {
                row[j] -= f * pivot_row[j];
            }
        }
    }
    let s: f64 = a
        .chunks_exact(w)
        .flat_map(|r| r[n..].iter())
        .map(|x| x.norm_sqr())
        .sum();
    s.is_finite().then(|| s.sqrt())
}

/// Orthonormal basis of `{b : m·b ≈ 0}`.
pub fn null_space(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let d = decompose(m);
    let th = rank_threshold(&d.singular_values, tol);
    d.singular_values
        .iter()
        .zip(d.right_vectors)
        .filter(|(s, _)| **s <= th)
        .map(|(_, v)| v)
        .collect()
}

/// Component of `v` orthogonal to the span of an orthonormal set.
pub fn project_out(v: &CVector, basis: &[CVector]) -> CVector {
    let mut out = v.clone();
    for b in basis {
        let c = b.dotc(&out);
        out -= b * c;
    }
    out
}

/// Gram–Schmidt orthonormalisation, dropping vectors of norm below `eps`.
pub fn orthonormalize(vectors: &[CVector], eps: f64) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for v in vectors {
        let mut w = project_out(v, &out);
        w = project_out(&w, &out);
        let n = w.norm();
        if n > eps {
            out.push(w / Complex64::new(n, 0.0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn wide_matrix_null_space_is_complete() {
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0), c(1.0), c(0.0)]);
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_null_vector() {
        let i = Complex64::new(0.0, 1.0);
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), i, c(2.0), i * 2.0]);
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.len(), 1);
        assert!((&m * &ns[0]).norm() < 1e-12);
        assert_eq!(numerical_rank(&singular_values(&m), 1e-8), 1);
    }

    #[test]
    fn small_matrices_use_absolute_floor() {
        let m = CMatrix::from_row_slice(1, 1, &[c(1e-9)]);
        assert_eq!(numerical_rank(&singular_values(&m), 1e-8), 0);
        assert_eq!(singular_values(&CMatrix::zeros(3, 2)), vec![0.0, 0.0]);
    }
}
