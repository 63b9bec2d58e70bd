//! Motifs, lattices and the crystal frameworks they generate.

pub mod document;
pub mod patch;
pub mod sublattice;

use std::fmt;

use nalgebra::DMatrix;

use crate::algebra::{laurent_determinant, Coefficient, ExactReal, LaurentPoly};
use crate::error::{Error, Result};

pub use document::FrameworkDocument;
pub use patch::{generate_patch, Patch, PatchEdge, PatchSpec};
pub use sublattice::{rescale_to_sublattice, IntegerSublattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientMode {
    Exact,
    Floating,
}

impl fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoefficientMode::Exact => "exact",
            CoefficientMode::Floating => "floating",
        })
    }
}

/// Lattice basis and motif positions over one coefficient type.
/// `basis[j]` is the period vector `a_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry<C> {
    pub basis: Vec<Vec<C>>,
    pub positions: Vec<Vec<C>>,
}

impl<C: Coefficient> Geometry<C> {
    pub fn lattice_point(&self, k: &[i64]) -> Vec<C> {
        let d = self.basis.len();
        let mut out = vec![C::zero(); d];
        for (a, &kj) in self.basis.iter().zip(k) {
            if kj == 0 {
                continue;
            }
            let s = C::from_rational(&crate::algebra::Rational::from_integer(kj.into()));
            for i in 0..d {
                out[i] = out[i].plus(&a[i].times(&s));
            }
        }
        out
    }

    pub fn position(&self, v: usize, k: &[i64]) -> Vec<C> {
        let t = self.lattice_point(k);
        self.positions[v]
            .iter()
            .zip(&t)
            .map(|(p, q)| p.plus(q))
            .collect()
    }

    /// `(p(v)+A·l) − (p(w)+A·m)`.
    pub fn bar_vector(&self, e: &Edge) -> Vec<C> {
        let a = self.position(e.v, &e.lv);
        let b = self.position(e.w, &e.lw);
        a.iter().zip(&b).map(|(x, y)| x.minus(y)).collect()
    }

    fn to_f64(&self) -> Geometry<f64> {
        let conv = |vs: &Vec<Vec<C>>| {
            vs.iter()
                .map(|v| v.iter().map(|c| c.to_f64()).collect())
                .collect()
        };
        Geometry {
            basis: conv(&self.basis),
            positions: conv(&self.positions),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coordinates {
    Exact(Geometry<ExactReal>),
    Floating(Geometry<f64>),
}

/// Edge joining `p(v, lv)` to `p(w, lw)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub v: usize,
    pub lv: Vec<i64>,
    pub w: usize,
    pub lw: Vec<i64>,
    pub name: String,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.v == self.w
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrystalFramework {
    dim: usize,
    names: Vec<String>,
    edges: Vec<Edge>,
    coords: Coordinates,
    float: Geometry<f64>,
}

impl CrystalFramework {
    /// Validates and assembles a framework.
    pub fn new(
        dim: usize,
        names: Vec<String>,
        coords: Coordinates,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Schema("dimension must be positive".into()));
        }
        let float = match &coords {
            Coordinates::Exact(g) => g.to_f64(),
            Coordinates::Floating(g) => g.clone(),
        };
        if float.basis.len() != dim || float.basis.iter().any(|a| a.len() != dim) {
            return Err(Error::Schema(format!(
                "basis must be {} vectors of length {}",
                dim, dim
            )));
        }
        if float.positions.len() != names.len() || float.positions.iter().any(|p| p.len() != dim) {
            return Err(Error::Schema(format!(
                "every vertex needs {} coordinates",
                dim
            )));
        }
        if names.is_empty() {
            return Err(Error::Schema("motif has no vertices".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateVertexName(n.clone()));
            }
        }
        let fw = CrystalFramework {
            dim,
            names,
            edges,
            coords,
            float,
        };
        if fw.basis_is_singular() {
            return Err(Error::SingularLattice);
        }
        for e in &fw.edges {
            if e.v >= fw.names.len() || e.w >= fw.names.len() {
                return Err(Error::UnknownVertex(e.name.clone()));
            }
            if e.lv.len() != dim || e.lw.len() != dim {
                return Err(Error::Schema(format!(
                    "edge {} offsets must have length {}",
                    e.name, dim
                )));
            }
            if e.v == e.w && e.lv == e.lw {
                return Err(Error::DegenerateEdge(e.name.clone()));
            }
            if fw.bar_is_zero(e) {
                return Err(Error::ZeroLengthBar(e.name.clone()));
            }
        }
        Ok(fw)
    }

    fn basis_is_singular(&self) -> bool {
        match &self.coords {
            Coordinates::Exact(g) => {
                let m: Vec<Vec<LaurentPoly<ExactReal>>> = g
                    .basis
                    .iter()
                    .map(|a| {
                        a.iter()
                            .map(|c| LaurentPoly::constant(0, c.clone()))
                            .collect()
                    })
                    .collect();
                laurent_determinant(&m, 0)
                    .map(|d| d.is_zero())
                    .unwrap_or(true)
            }
            Coordinates::Floating(g) => {
                let d = self.dim;
                let m = DMatrix::from_fn(d, d, |i, j| g.basis[j][i]);
                let scale: f64 = g
                    .basis
                    .iter()
                    .map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt())
                    .product();
                m.determinant().abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
            }
        }
    }

    fn bar_is_zero(&self, e: &Edge) -> bool {
        match &self.coords {
            Coordinates::Exact(g) => g.bar_vector(e).iter().all(|c| c.is_zero()),
            Coordinates::Floating(g) => {
                let b = g.bar_vector(e);
                let scale = g.basis.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
                b.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-12 * scale
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    pub fn mode(&self) -> CoefficientMode {
        match self.coords {
            Coordinates::Exact(_) => CoefficientMode::Exact,
            Coordinates::Floating(_) => CoefficientMode::Floating,
        }
    }

    /// Floating view of the geometry, available in both modes.
    pub fn geometry_f64(&self) -> &Geometry<f64> {
        &self.float
    }

    pub fn exact_geometry(&self) -> Option<&Geometry<ExactReal>> {
        match &self.coords {
            Coordinates::Exact(g) => Some(g),
            Coordinates::Floating(_) => None,
        }
    }

    /// Number of velocity coordinates, `d|F_v|`.
    pub fn dof(&self) -> usize {
        self.dim * self.names.len()
    }

    pub fn is_maxwell(&self) -> bool {
        self.edges.len() == self.dof()
    }

    pub fn require_maxwell(&self) -> Result<()> {
        if self.is_maxwell() {
            Ok(())
        } else {
            Err(Error::NotMaxwell {
                edges: self.edges.len(),
                dof: self.dof(),
            })
        }
    }

    pub fn position_f64(&self, v: usize, k: &[i64]) -> Vec<f64> {
        self.float.position(v, k)
    }

    pub fn bar_vector_f64(&self, e: usize) -> Vec<f64> {
        self.float.bar_vector(&self.edges[e])
    }

    pub fn bar_length(&self, e: usize) -> f64 {
        self.bar_vector_f64(e)
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Same framework with an extra unit-spaced axis: motif lifted to height 0
    /// and one vertical bar per vertex from level 0 to level 1.
    pub fn product_with_line(&self) -> CrystalFramework {
        fn lift<C: Coefficient>(g: &Geometry<C>) -> Geometry<C> {
            let d = g.basis.len();
            let mut basis: Vec<Vec<C>> = g
                .basis
                .iter()
                .map(|a| {
                    a.iter()
                        .cloned()
                        .chain(std::iter::once(C::zero()))
                        .collect()
                })
                .collect();
            let mut top = vec![C::zero(); d + 1];
            top[d] = C::one();
            basis.push(top);
            let positions = g
                .positions
                .iter()
                .map(|p| {
                    p.iter()
                        .cloned()
                        .chain(std::iter::once(C::zero()))
                        .collect()
                })
                .collect();
            Geometry { basis, positions }
        }
        let d = self.dim;
        let pad = |l: &Vec<i64>| {
            l.iter()
                .copied()
                .chain(std::iter::once(0))
                .collect::<Vec<_>>()
        };
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                v: e.v,
                lv: pad(&e.lv),
                w: e.w,
                lw: pad(&e.lw),
                name: e.name.clone(),
            })
            .collect();
        for (v, name) in self.names.iter().enumerate() {
            let mut up = vec![0; d + 1];
            up[d] = 1;
            edges.push(Edge {
                v,
                lv: vec![0; d + 1],
                w: v,
                lw: up,
                name: format!("{}^", name),
            });
        }
        let coords = match &self.coords {
            Coordinates::Exact(g) => Coordinates::Exact(lift(g)),
            Coordinates::Floating(g) => Coordinates::Floating(lift(g)),
        };
        CrystalFramework::new(d + 1, self.names.clone(), coords, edges)
            .expect("lifted framework is valid")
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            dimension: self.dim,
            vertices: self.num_vertices(),
            edges: self.num_edges(),
            maxwell: self.is_maxwell(),
            mode: self.mode(),
            bar_lengths: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| (e.name.clone(), self.bar_length(i)))
                .collect(),
        }
    }
}

pub fn validate_framework(c: &CrystalFramework) -> Diagnostics {
    c.diagnostics()
}

pub fn product_with_line(c: &CrystalFramework) -> CrystalFramework {
    c.product_with_line()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub dimension: usize,
    pub vertices: usize,
    pub edges: usize,
    pub maxwell: bool,
    pub mode: CoefficientMode,
    pub bar_lengths: Vec<(String, f64)>,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension: {}", self.dimension)?;
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "vertices |F_v|: {}", self.vertices)?;
        writeln!(f, "edges |F_e|: {}", self.edges)?;
        writeln!(
            f,
            "Maxwell: {} ({} edges, {} vertex coordinates)",
            if self.maxwell { "yes" } else { "no" },
            self.edges,
            self.dimension * self.vertices
        )?;
        writeln!(f, "bar lengths:")?;
        for (name, len) in &self.bar_lengths {
            writeln!(f, "  {:<8} {:.12}", name, len)?;
        }
        Ok(())
    }
}
