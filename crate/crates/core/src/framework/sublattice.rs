//! Full-rank integer sublattices `M·Z^d`, Hermite normal forms and rescaling.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use super::{Coordinates, CrystalFramework, Edge, Geometry};
use crate::algebra::Coefficient;
use crate::error::{Error, Result};
use crate::phase::{Coord, Phase};

/// Sublattice generated by the columns of `m` (`m[i][j]` is row `i`, column `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSublattice {
    m: Vec<Vec<i64>>,
    h: Vec<Vec<i64>>,
    u: Vec<Vec<i64>>,
}

type Mat = Vec<Vec<i128>>;

fn col_axpy(a: &mut Mat, dst: usize, src: usize, q: i128) {
    for row in a.iter_mut() {
        row[dst] -= q * row[src];
    }
}

fn col_swap(a: &mut Mat, i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn col_negate(a: &mut Mat, i: usize) {
    for row in a.iter_mut() {
        row[i] = -row[i];
    }
}

type IntMat = Vec<Vec<i64>>;

/// Column-style Hermite normal form `H = M·U`: lower triangular, positive
/// diagonal, entries left of the diagonal reduced into `[0, h_ii)`.
fn hermite(m: &[Vec<i64>]) -> Option<(IntMat, IntMat)> {
    let d = m.len();
    let mut h: Mat = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Mat = (0..d)
        .map(|i| (0..d).map(|j| (i == j) as i128).collect())
        .collect();
    for i in 0..d {
        for j in i + 1..d {
            while h[i][j] != 0 {
                let q = Integer::div_floor(&h[i][i], &h[i][j]);
                col_axpy(&mut h, i, j, q);
                col_axpy(&mut u, i, j, q);
                col_swap(&mut h, i, j);
                col_swap(&mut u, i, j);
            }
        }
        if h[i][i] == 0 {
            return None;
        }
        if h[i][i] < 0 {
            col_negate(&mut h, i);
            col_negate(&mut u, i);
        }
        for j in 0..i {
            let q = Integer::div_floor(&h[i][j], &h[i][i]);
            col_axpy(&mut h, j, i, q);
            col_axpy(&mut u, j, i, q);
        }
    }
    let conv = |a: Mat| {
        a.into_iter()
            .map(|r| r.into_iter().map(|x| x as i64).collect())
            .collect()
    };
    Some((conv(h), conv(u)))
}

impl IntegerSublattice {
    pub fn new(m: Vec<Vec<i64>>) -> Result<Self> {
        let d = m.len();
        if d == 0 || m.iter().any(|r| r.len() != d) {
            return Err(Error::Invalid("sublattice matrix must be square".into()));
        }
        let (h, u) = hermite(&m).ok_or(Error::SingularSublattice)?;
        Ok(IntegerSublattice { m, h, u })
    }

    pub fn diagonal(diag: &[i64]) -> Result<Self> {
        let d = diag.len();
        Self::new(
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect())
                .collect(),
        )
    }

    pub fn identity(d: usize) -> Self {
        Self::diagonal(&vec![1; d]).expect("identity is nonsingular")
    }

    /// Parses rows separated by `;`, entries by `,`: `"2,0;0,1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::parse(text, "bad integer entry"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn hermite_form(&self) -> &[Vec<i64>] {
        &self.h
    }

    /// `|det M|`, the number of cosets.
    pub fn index(&self) -> usize {
        (0..self.dim()).map(|i| self.h[i][i] as usize).product()
    }

    /// Column `j` of `M`.
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.m.iter().map(|r| r[j]).collect()
    }

    /// Coset representatives of `Z^d / M·Z^d`: the box `Π [0, h_ii)` in
    /// lexicographic order.
    pub fn coset_representatives(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for i in 0..self.dim() {
            let n = self.h[i][i];
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (0..n).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Writes `x = r + M·q` with `r` a coset representative.
    pub fn reduce(&self, x: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let d = self.dim();
        let mut r = x.to_vec();
        let mut qh = vec![0i64; d];
        for i in 0..d {
            let q = Integer::div_floor(&r[i], &self.h[i][i]);
            qh[i] = q;
            for (rk, hk) in r.iter_mut().zip(&self.h) {
                *rk -= q * hk[i];
            }
        }
        let q = (0..d)
            .map(|i| (0..d).map(|j| self.u[i][j] * qh[j]).sum())
            .collect();
        (r, q)
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        Self::new(
            (0..d)
                .map(|i| (0..d).map(|j| self.m[j][i]).collect())
                .collect(),
        )
        .expect("transpose is nonsingular")
    }

    /// `(Mᵀ)^{-1}` over the rationals.
    fn inverse_transpose(&self) -> Vec<Vec<Rational64>> {
        let d = self.dim();
        let mut a: Vec<Vec<Rational64>> = (0..d)
            .map(|i| {
                (0..2 * d)
                    .map(|j| {
                        if j < d {
                            Rational64::from_integer(self.m[j][i])
                        } else {
                            Rational64::from_integer((j - d == i) as i64)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| !a[r][col].is_zero())
                .expect("nonsingular");
            a.swap(col, piv);
            let p = a[col][col];
            for x in a[col].iter_mut() {
                *x /= p;
            }
            for r in 0..d {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col];
                    let pivot_row = a[col].clone();
                    for (x, v) in a[r].iter_mut().zip(pivot_row) {
                        *x -= f * v;
                    }
                }
            }
        }
        a.into_iter().map(|r| r[d..].to_vec()).collect()
    }

    /// The `|det M|` phases whose characters are trivial on `M·Z^d`:
    /// `t ∈ (Mᵀ)^{-1}Z^d mod 1`, exact.
    pub fn dual_phases(&self) -> Vec<Phase> {
        let inv = self.inverse_transpose();
        let d = self.dim();
        self.transpose()
            .coset_representatives()
            .into_iter()
            .map(|n| {
                Phase(
                    (0..d)
                        .map(|i| {
                            let s =
                                (0..d).fold(Rational64::zero(), |acc, j| acc + inv[i][j] * n[j]);
                            Coord::Rational(s).wrapped()
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Phase of the rescaled framework matching `t`: `t'_j = m_j·t mod 1`.
    pub fn image_phase(&self, t: &Phase) -> Phase {
        Phase((0..self.dim()).map(|j| t.dot(&self.column(j))).collect())
    }
}

pub fn spectrum_rescale_image(s: &IntegerSublattice, t: &Phase) -> Phase {
    s.image_phase(t)
}

fn rescaled_geometry<C: Coefficient>(
    g: &Geometry<C>,
    s: &IntegerSublattice,
    reps: &[Vec<i64>],
) -> Geometry<C> {
    let d = s.dim();
    let basis = (0..d).map(|j| g.lattice_point(&s.column(j))).collect();
    let mut positions = Vec::new();
    for r in reps {
        for v in 0..g.positions.len() {
            positions.push(g.position(v, r));
        }
    }
    Geometry { basis, positions }
}

/// Re-expresses the framework over the sublattice `A·M`. Vertex `(v, r)` for
/// coset representative `r` becomes motif vertex `r_index·|F_v| + v`.
pub fn rescale_to_sublattice(
    c: &CrystalFramework,
    s: &IntegerSublattice,
) -> Result<CrystalFramework> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: s.dim(),
        });
    }
    let reps = s.coset_representatives();
    let nv = c.num_vertices();
    let rep_index = |r: &Vec<i64>| {
        reps.iter()
            .position(|x| x == r)
            .expect("reduced to a representative")
    };
    let mut names = Vec::with_capacity(reps.len() * nv);
    for r in &reps {
        for n in c.vertex_names() {
            let tag: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            names.push(format!("{}@{}", n, tag.join(",")));
        }
    }
    let mut edges = Vec::with_capacity(reps.len() * c.num_edges());
    for r in &reps {
        for e in c.edges() {
            let a: Vec<i64> = e.lv.iter().zip(r).map(|(x, y)| x + y).collect();
            let b: Vec<i64> = e.lw.iter().zip(r).map(|(x, y)| x + y).collect();
            let (ra, qa) = s.reduce(&a);
            let (rb, qb) = s.reduce(&b);
            let tag: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            edges.push(Edge {
                v: rep_index(&ra) * nv + e.v,
                lv: qa,
                w: rep_index(&rb) * nv + e.w,
                lw: qb,
                name: if s.index() == 1 {
                    e.name.clone()
                } else {
                    format!("{}@{}", e.name, tag.join(","))
                },
            });
        }
    }
    let coords = match c.coordinates() {
        Coordinates::Exact(g) => Coordinates::Exact(rescaled_geometry(g, s, &reps)),
        Coordinates::Floating(g) => Coordinates::Floating(rescaled_geometry(g, s, &reps)),
    };
    CrystalFramework::new(c.dim(), names, coords, edges)
}
