//! The symbol matrix Φ(z) and the rigidity operator on finite patches.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{variable_names, Coefficient, ExactReal, LaurentPoly, PolyMatrix};
use crate::error::{Error, Result};
use crate::framework::{Coordinates, CrystalFramework, Geometry, Patch};
use crate::linalg::{self, CMatrix, CVector, DEFAULT_RANK_TOL};
use crate::phase::Phase;

/// One monomial of a compiled entry: coefficient and exponent vector.
#[derive(Clone, Debug)]
struct Term {
    row: usize,
    col: usize,
    coeff: f64,
    exp: Vec<i32>,
}

/// `|F_e| × d|F_v|` matrix of Laurent polynomials. `z̄` is stored as exponent −1.
#[derive(Clone, Debug)]
pub struct SymbolMatrix {
    nvars: usize,
    rows: usize,
    cols: usize,
    exact: Option<PolyMatrix<ExactReal>>,
    float: PolyMatrix<f64>,
    terms: Vec<Term>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

fn compile(m: &PolyMatrix<f64>) -> Vec<Term> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            for (e, c) in p.terms() {
                out.push(Term {
                    row: i,
                    col: j,
                    coeff: *c,
                    exp: e.clone(),
                });
            }
        }
    }
    out
}

fn symbol_entries<C: Coefficient>(c: &CrystalFramework, g: &Geometry<C>) -> PolyMatrix<C> {
    let d = c.dim();
    let cols = c.dof();
    let zbar = |l: &[i64]| -> LaurentPoly<C> {
        LaurentPoly::monomial(l.iter().map(|&x| -(x as i32)).collect(), C::one())
    };
    c.edges()
        .iter()
        .map(|e| {
            let bar = g.bar_vector(e);
            let mut row = vec![LaurentPoly::zero(d); cols];
            if e.is_loop() {
                let m = zbar(&e.lv).sub(&zbar(&e.lw));
                for i in 0..d {
                    row[e.v * d + i] = m.scale(&bar[i]);
                }
            } else {
                let a = zbar(&e.lv);
                let b = zbar(&e.lw);
                for i in 0..d {
                    row[e.v * d + i] = a.scale(&bar[i]);
                    row[e.w * d + i] = b.scale(&bar[i].negated());
                }
            }
            row
        })
        .collect()
}

fn default_col_labels(names: &[String], d: usize) -> Vec<String> {
    let axes = ["x", "y", "z"];
    let mut out = Vec::new();
    for n in names {
        for i in 0..d {
            out.push(match axes.get(i) {
                Some(a) if d <= 3 => format!("{}.{}", n, a),
                _ => format!("{}.{}", n, i + 1),
            });
        }
    }
    out
}

impl SymbolMatrix {
    fn assemble(
        nvars: usize,
        exact: Option<PolyMatrix<ExactReal>>,
        float: PolyMatrix<f64>,
    ) -> Self {
        let rows = float.len();
        let cols = float.first().map_or(0, |r| r.len());
        let terms = compile(&float);
        SymbolMatrix {
            nvars,
            rows,
            cols,
            exact,
            float,
            terms,
            row_labels: (0..rows).map(|i| format!("r{}", i)).collect(),
            col_labels: (0..cols).map(|j| format!("c{}", j)).collect(),
        }
    }

    /// Wraps an explicit exact matrix.
    pub fn from_exact(entries: PolyMatrix<ExactReal>, nvars: usize) -> Self {
        let float = entries
            .iter()
            .map(|r| r.iter().map(|p| p.to_f64()).collect())
            .collect();
        Self::assemble(nvars, Some(entries), float)
    }

    pub fn from_float(entries: PolyMatrix<f64>, nvars: usize) -> Self {
        Self::assemble(nvars, None, entries)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn exact_entries(&self) -> Option<&PolyMatrix<ExactReal>> {
        self.exact.as_ref()
    }

    pub fn float_entries(&self) -> &PolyMatrix<f64> {
        &self.float
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&LaurentPoly<ExactReal>> {
        self.exact.as_ref().map(|m| &m[i][j])
    }

    /// Evaluation at `z = e^{2πi t}`, or at its conjugate when `conjugate` is set.
    pub fn eval_f64(&self, t: &[f64], conjugate: bool) -> CMatrix {
        let sign = if conjugate { -1.0 } else { 1.0 };
        let z: Vec<Complex64> = t
            .iter()
            .map(|x| Complex64::from_polar(1.0, sign * std::f64::consts::TAU * x))
            .collect();
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for term in &self.terms {
            let mut v = Complex64::new(term.coeff, 0.0);
            for (zj, &k) in z.iter().zip(&term.exp) {
                if k != 0 {
                    v *= zj.powi(k);
                }
            }
            m[(term.row, term.col)] += v;
        }
        m
    }

    /// Evaluation at a phase using exact characters where available.
    pub fn eval(&self, t: &Phase, conjugate: bool) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for term in &self.terms {
            let k: Vec<i64> = term
                .exp
                .iter()
                .map(|&e| if conjugate { -(e as i64) } else { e as i64 })
                .collect();
            m[(term.row, term.col)] += t.character(&k) * term.coeff;
        }
        m
    }

    /// Plain-text layout with row and column labels.
    pub fn render(&self) -> String {
        let names = variable_names(self.nvars);
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| match &self.exact {
                        Some(m) => m[i][j].display_with(&names),
                        None => self.float[i][j].display_with(&names),
                    })
                    .collect()
            })
            .collect();
        let label_w = self.row_labels.iter().map(|s| s.len()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..self.cols)
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(self.col_labels[j].len()))
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut out = format!("{:label_w$} ", "");
        for (j, w) in widths.iter().enumerate() {
            out.push_str(&format!(" | {:^w$}", self.col_labels[j], w = w));
        }
        out.push('\n');
        for (i, row) in cells.iter().enumerate() {
            out.push_str(&format!("{:label_w$} ", self.row_labels[i]));
            for (j, w) in widths.iter().enumerate() {
                out.push_str(&format!(" | {:^w$}", row[j], w = w));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for SymbolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn build_symbol(c: &CrystalFramework) -> SymbolMatrix {
    let mut s = match c.coordinates() {
        Coordinates::Exact(g) => SymbolMatrix::from_exact(symbol_entries(c, g), c.dim()),
        Coordinates::Floating(g) => SymbolMatrix::from_float(symbol_entries(c, g), c.dim()),
    };
    s.row_labels = c.edges().iter().map(|e| e.name.clone()).collect();
    s.col_labels = default_col_labels(c.vertex_names(), c.dim());
    s
}

pub fn eval_symbol_at(s: &SymbolMatrix, t: &Phase, conjugate: bool) -> CMatrix {
    s.eval(t, conjugate)
}

pub fn rank_at_phase(s: &SymbolMatrix, t: &Phase, tol: f64) -> usize {
    linalg::numerical_rank(&linalg::singular_values(&s.eval(t, true)), tol)
}

/// Orthonormal basis of the null space of Φ(ω̄); each `b` gives the flex
/// `u(v,k) = ω^k b_v`.
pub fn null_space_at_phase(s: &SymbolMatrix, t: &Phase, tol: f64) -> Vec<CVector> {
    linalg::null_space(&s.eval(t, true), tol)
}

/// Orthonormal basis of the `d` constant translation fields.
pub fn translation_basis(d: usize, nv: usize) -> Vec<CVector> {
    let norm = 1.0 / (nv as f64).sqrt();
    (0..d)
        .map(|i| {
            CVector::from_fn(d * nv, |r, _| {
                if r % d == i {
                    Complex64::new(norm, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PeriodicRigidity {
    pub rigid: bool,
    pub rank: usize,
    /// `d|F_v| − d`.
    pub expected_rank: usize,
    pub null_space: Vec<CVector>,
    pub translations_only: bool,
    /// A strictly periodic flex orthogonal to the translations, if any.
    pub witness: Option<CVector>,
}

/// Strict periodic rigidity: `rank Φ(1̂) = d|F_v| − d`.
pub fn periodic_rigidity_test(c: &CrystalFramework, tol: f64) -> PeriodicRigidity {
    let s = build_symbol(c);
    let m = s.eval(&Phase::zero(c.dim()), true);
    let rank = linalg::numerical_rank(&linalg::singular_values(&m), tol);
    let null = linalg::null_space(&m, tol);
    let trans = translation_basis(c.dim(), c.num_vertices());
    let residues: Vec<CVector> = null
        .iter()
        .map(|b| linalg::project_out(b, &trans))
        .collect();
    let extra = linalg::orthonormalize(&residues, 1e-6);
    let expected_rank = c.dof() - c.dim();
    PeriodicRigidity {
        rigid: rank == expected_rank,
        rank,
        expected_rank,
        translations_only: extra.is_empty(),
        witness: extra.first().map(real_representative),
        null_space: null,
    }
}

/// Rotates a complex vector so that its largest entry is real and positive.
pub fn real_representative(v: &CVector) -> CVector {
    let (mut best, mut arg) = (0.0, 0.0);
    for x in v.iter() {
        if x.norm() > best + 1e-12 {
            best = x.norm();
            arg = x.arg();
        }
    }
    let rot = Complex64::from_polar(1.0, -arg);
    v.map(|x| {
        let y = x * rot;
        Complex64::new(clean(y.re), clean(y.im))
    })
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else {
        x
    }
}

/// Per-edge residuals `p(e)·(u(v,l+k) − u(w,m+k))` of a velocity field on a patch.
#[derive(Clone, Debug)]
pub struct PatchResidual {
    pub values: Vec<Complex64>,
    pub sup_norm: f64,
}

/// Velocity sample at vertex copy `(v, k)`, `None` when outside the sampled region.
pub type VelocityField<'a> = dyn Fn(usize, &[i64]) -> Option<Vec<Complex64>> + 'a;

/// Velocity samples are supplied per vertex copy `(v, k)` as `d` complex components.
pub fn rigidity_residual_on_patch(
    c: &CrystalFramework,
    patch: &Patch,
    u: &VelocityField,
) -> Result<PatchResidual> {
    let mut cache: Vec<Option<Vec<Complex64>>> = vec![None; patch.vertices.len()];
    let mut fetch = |i: usize| -> Result<Vec<Complex64>> {
        if cache[i].is_none() {
            let (v, k) = &patch.vertices[i];
            let val = u(*v, k).ok_or_else(|| Error::MissingSample {
                vertex: *v,
                offset: k.clone(),
            })?;
            if val.len() != c.dim() {
                return Err(Error::DimensionMismatch {
                    expected: c.dim(),
                    found: val.len(),
                });
            }
            cache[i] = Some(val);
        }
        Ok(cache[i].clone().unwrap())
    };
    let bars: Vec<Vec<f64>> = (0..c.num_edges()).map(|e| c.bar_vector_f64(e)).collect();
    let mut values = Vec::with_capacity(patch.edges.len());
    let mut sup: f64 = 0.0;
    for pe in &patch.edges {
        let a = fetch(pe.tail)?;
        let b = fetch(pe.head)?;
        let r: Complex64 = bars[pe.edge]
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(p, (x, y))| (x - y) * *p)
            .sum();
        sup = sup.max(r.norm());
        values.push(r);
    }
    Ok(PatchResidual {
        values,
        sup_norm: sup,
    })
}

/// The phase-periodic field `u(v,k) = ω^k b_v`.
pub fn phase_periodic_field<'a>(
    t: &'a Phase,
    b: &'a CVector,
    d: usize,
) -> impl Fn(usize, &[i64]) -> Option<Vec<Complex64>> + 'a {
    move |v, k| {
        let w = t.character(k);
        Some((0..d).map(|i| w * b[v * d + i]).collect())
    }
}

pub fn default_tolerance() -> f64 {
    DEFAULT_RANK_TOL
}
