//! Finite pieces of the infinite framework.

use std::collections::HashMap;

use super::CrystalFramework;

/// Integer box `Π [lo_j, hi_j]` of lattice offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchSpec {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl PatchSpec {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "empty patch box");
        PatchSpec { lo, hi }
    }

    /// `[lo, hi]^d`.
    pub fn cube(d: usize, lo: i64, hi: i64) -> Self {
        Self::new(vec![lo; d], vec![hi; d])
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    /// Lattice points of the box in lexicographic order.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (*l..=*h).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Copy `(e, k)` of a motif edge, joining `(v, l+k)` to `(w, m+k)`; `tail` and `head` index `Patch::vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchEdge {
    pub edge: usize,
    pub k: Vec<i64>,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    /// Vertex copies `(v, k)`, offsets outer, motif vertices inner.
    pub vertices: Vec<(usize, Vec<i64>)>,
    pub edges: Vec<PatchEdge>,
}

impl Patch {
    pub fn vertex_lookup(&self) -> HashMap<(usize, Vec<i64>), usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, (v, k))| ((*v, k.clone()), i))
            .collect()
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All vertex copies in the box and every edge copy with both ends inside it.
pub fn generate_patch(c: &CrystalFramework, spec: &PatchSpec) -> Patch {
    let offsets = spec.points();
    let mut vertices = Vec::with_capacity(offsets.len() * c.num_vertices());
    for k in &offsets {
        for v in 0..c.num_vertices() {
            vertices.push((v, k.clone()));
        }
    }
    let index: HashMap<(usize, Vec<i64>), usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, (v, k))| ((*v, k.clone()), i))
        .collect();
    let mut edges = Vec::new();
    for (ei, e) in c.edges().iter().enumerate() {
        let lo = spec
            .lo
            .iter()
            .zip(e.lv.iter().zip(&e.lw))
            .map(|(l, (a, b))| l - a.min(b))
            .collect::<Vec<_>>();
        let hi = spec
            .hi
            .iter()
            .zip(e.lv.iter().zip(&e.lw))
            .map(|(h, (a, b))| h - a.max(b))
            .collect::<Vec<_>>();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            continue;
        }
        for k in PatchSpec::new(lo, hi).points() {
            let a = index.get(&(e.v, add(&e.lv, &k)));
            let b = index.get(&(e.w, add(&e.lw, &k)));
            if let (Some(&tail), Some(&head)) = (a, b) {
                edges.push(PatchEdge {
                    edge: ei,
                    k,
                    tail,
                    head,
                });
            }
        }
    }
    Patch { vertices, edges }
}
