//! Sampling the RUM spectrum on uniform torus grids.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::framework::CrystalFramework;
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::phase::Phase;
use crate::symbol::{build_symbol, SymbolMatrix};

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    pub resolution: usize,
    pub tolerance: f64,
    /// Search between grid nodes for zeros of σ_min (two-dimensional tori only).
    pub refine: bool,
    pub estimate_dimension: bool,
}

impl SpectrumOptions {
    pub fn new(resolution: usize) -> Self {
        SpectrumOptions {
            resolution,
            tolerance: DEFAULT_RANK_TOL,
            refine: true,
            estimate_dimension: true,
        }
    }

    pub fn for_dimension(d: usize) -> Self {
        Self::new(default_resolution(d))
    }
}

pub fn default_resolution(d: usize) -> usize {
    match d {
        1 => 1024,
        2 => 256,
        _ => 48,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSample {
    pub t: Vec<f64>,
    /// Grid index for grid samples; `None` for refined off-grid points.
    pub index: Option<Vec<usize>>,
    pub sigma_min: f64,
    pub deficiency: usize,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub dimension: usize,
    pub resolution: usize,
    pub tolerance: f64,
    /// Grid hits in row-major order.
    pub hits: Vec<SpectrumSample>,
    /// Off-grid zeros found by refinement, sorted by `t`.
    pub curve_points: Vec<SpectrumSample>,
    pub singleton_flag: bool,
    pub estimated_dimension: Option<usize>,
}

impl SpectrumReport {
    /// Grid hits and curve points merged in lexicographic order of `t`.
    pub fn all_hits(&self) -> Vec<&SpectrumSample> {
        let mut out: Vec<&SpectrumSample> = self.hits.iter().chain(&self.curve_points).collect();
        out.sort_by(|a, b| {
            a.t.iter()
                .zip(&b.t)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        out
    }

    pub fn hit_count(&self) -> usize {
        self.hits.len() + self.curve_points.len()
    }

    /// Whether `t` lies within `cells` grid cells of some hit.
    pub fn near_hit(&self, t: &[f64], cells: f64) -> bool {
        let p = Phase::from_f64(t);
        let r = cells / self.resolution as f64 + 1e-12;
        self.hits
            .iter()
            .chain(&self.curve_points)
            .any(|h| Phase::from_f64(&h.t).distance(&p) <= r)
    }
}

struct PointValue {
    /// `σ_min` when a full decomposition was needed, otherwise the lower bound `1/‖Φ⁻¹‖_F`.
    sigma_min: f64,
    deficiency: usize,
}

fn measure(s: &SymbolMatrix, t: &[f64], tol: f64) -> PointValue {
    let m = s.eval_f64(t, true);
    if m.is_square() {
        if let Some(inv) = linalg::inverse_frobenius(&m) {
            let bound = 1.0 / inv;
            if bound > tol * m.norm().max(1.0) {
                return PointValue {
                    sigma_min: bound,
                    deficiency: 0,
                };
            }
        }
    }
    exact_measure(s, t, tol)
}

fn exact_measure(s: &SymbolMatrix, t: &[f64], tol: f64) -> PointValue {
    let sv = linalg::singular_values(&s.eval_f64(t, true));
    let rank = linalg::numerical_rank(&sv, tol);
    PointValue {
        sigma_min: sv.last().copied().unwrap_or(0.0),
        deficiency: s.cols() - rank,
    }
}

/// Cheap function vanishing exactly where `Φ` is singular, used for line searches.
fn proxy(s: &SymbolMatrix, t: &[f64]) -> f64 {
    let m = s.eval_f64(t, true);
    if m.is_square() {
        linalg::inverse_frobenius(&m).map_or(0.0, |x| 1.0 / x)
    } else {
        linalg::singular_values(&m).last().copied().unwrap_or(0.0)
    }
}

/// Membership of a phase in the spectrum, with the rank deficiency.
pub fn in_spectrum(c: &CrystalFramework, t: &Phase, tol: f64) -> (bool, usize) {
    let s = build_symbol(c);
    let sv = linalg::singular_values(&s.eval(t, true));
    let def = s.cols() - linalg::numerical_rank(&sv, tol);
    (def >= 1, def)
}

fn unflatten(mut flat: usize, n: usize, d: usize) -> Vec<usize> {
    let mut idx = vec![0; d];
    for j in (0..d).rev() {
        idx[j] = flat % n;
        flat /= n;
    }
    idx
}

fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

pub fn sample_spectrum(c: &CrystalFramework, opts: &SpectrumOptions) -> SpectrumReport {
    sample_symbol_spectrum(&build_symbol(c), opts)
}

/// Samples any symbol matrix; the torus dimension is the number of variables.
pub fn sample_symbol_spectrum(s: &SymbolMatrix, opts: &SpectrumOptions) -> SpectrumReport {
    let mut report = sweep(s, opts.resolution, opts.tolerance, opts.refine);
    if opts.estimate_dimension {
        let fine = sweep(s, 2 * opts.resolution, opts.tolerance, opts.refine);
        report.estimated_dimension = Some(dimension_from_counts(
            report.hit_count(),
            fine.hit_count(),
            s.nvars(),
        ));
    }
    report
}

/// `round(log₂(h₂/h₁))` clamped to `[0, d]`.
pub fn dimension_from_counts(coarse: usize, fine: usize, d: usize) -> usize {
    if coarse == 0 || fine == 0 {
        return 0;
    }
    let e = (fine as f64 / coarse as f64).log2().round();
    e.clamp(0.0, d as f64) as usize
}

/// Box-counting estimate of the RUM dimension from resolutions `N` and `2N`.
pub fn rum_dimension_estimate(c: &CrystalFramework, n: usize) -> usize {
    let s = build_symbol(c);
    let a = sweep(&s, n, DEFAULT_RANK_TOL, true);
    let b = sweep(&s, 2 * n, DEFAULT_RANK_TOL, true);
    dimension_from_counts(a.hit_count(), b.hit_count(), c.dim())
}

fn sweep(s: &SymbolMatrix, n: usize, tol: f64, refine: bool) -> SpectrumReport {
    assert!(n >= 2, "grid resolution must be at least 2");
    let d = s.nvars();
    let total = n.pow(d as u32);
    let values: Vec<PointValue> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let t: Vec<f64> = unflatten(flat, n, d)
                .iter()
                .map(|&i| i as f64 / n as f64)
                .collect();
            measure(s, &t, tol)
        })
        .collect();
    let hits: Vec<SpectrumSample> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.deficiency >= 1)
        .map(|(flat, v)| {
            let idx = unflatten(flat, n, d);
            SpectrumSample {
                t: idx.iter().map(|&i| i as f64 / n as f64).collect(),
                index: Some(idx),
                sigma_min: v.sigma_min,
                deficiency: v.deficiency,
            }
        })
        .collect();
    let curve_points = if refine && d == 2 {
        refine_plane(s, n, tol, &values, &hits)
    } else {
        Vec::new()
    };
    let singleton_flag = singleton(&hits, &curve_points, n, d);
    SpectrumReport {
        dimension: d,
        resolution: n,
        tolerance: tol,
        hits,
        curve_points,
        singleton_flag,
        estimated_dimension: None,
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of `f` on `[a, b]`. Gives up early once the
/// minimum stops shrinking, which happens at minima that are not zeros.
fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut checkpoint = f1.min(f2);
    for it in 1..=90 {
        if b - a < 1e-15 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
        if it % 10 == 0 {
            let now = f1.min(f2);
            if now > 0.5 * checkpoint {
                break;
            }
            checkpoint = now;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Line scans along both axes plus coordinate descent from isolated minima.
fn refine_plane(
    s: &SymbolMatrix,
    n: usize,
    tol: f64,
    values: &[PointValue],
    hits: &[SpectrumSample],
) -> Vec<SpectrumSample> {
    let sigma = |i: usize, j: usize| values[flatten(&[i % n, j % n], n)].sigma_min;
    let is_hit = |i: usize, j: usize| values[flatten(&[i % n, j % n], n)].deficiency >= 1;
    let h = 1.0 / n as f64;
    let sigma_at = |t: &[f64]| proxy(s, t);

    let mut seeds: Vec<(usize, usize, usize)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if is_hit(i, j) {
                continue;
            }
            let c = sigma(i, j);
            if c <= sigma(i + n - 1, j) && c <= sigma(i + 1, j) {
                seeds.push((0, i, j));
            }
            if c <= sigma(i, j + n - 1) && c <= sigma(i, j + 1) {
                seeds.push((1, i, j));
            }
        }
    }
    let hit_cells: HashSet<(usize, usize)> = hits
        .iter()
        .map(|s| {
            let idx = s.index.as_ref().unwrap();
            (idx[0], idx[1])
        })
        .collect();
    let near_hit = |i: usize, j: usize| {
        (0..3).any(|a| {
            (0..3).any(|b| hit_cells.contains(&((i + n + a - 1) % n, (j + n + b - 1) % n)))
        })
    };
    for j in 0..n {
        for i in 0..n {
            if is_hit(i, j) || near_hit(i, j) {
                continue;
            }
            let c = sigma(i, j);
            let isolated = (0..3).all(|a| {
                (0..3).all(|b| (a == 1 && b == 1) || c <= sigma(i + n + a - 1, j + n + b - 1))
            });
            if isolated {
                seeds.push((2, i, j));
            }
        }
    }

    let search = |&(kind, i, j): &(usize, usize, usize)| -> Option<Vec<f64>> {
        let t0 = [i as f64 * h, j as f64 * h];
        let point = match kind {
            0 => {
                let f = |x: f64| sigma_at(&[wrap(x), t0[1]]);
                let (x, _) = golden_min(&f, t0[0] - h, t0[0] + h);
                vec![wrap(x), t0[1]]
            }
            1 => {
                let f = |y: f64| sigma_at(&[t0[0], wrap(y)]);
                let (y, _) = golden_min(&f, t0[1] - h, t0[1] + h);
                vec![t0[0], wrap(y)]
            }
            _ => {
                let mut p = t0.to_vec();
                for _ in 0..6 {
                    let before = p.clone();
                    for axis in 0..2 {
                        let q = p.clone();
                        let f = |x: f64| {
                            let mut r = q.clone();
                            r[axis] = wrap(x);
                            sigma_at(&r)
                        };
                        let (x, _) = golden_min(&f, q[axis] - h, q[axis] + h);
                        p[axis] = wrap(x);
                    }
                    if Phase::from_f64(&p).distance(&Phase::from_f64(&before)) < 1e-14 {
                        break;
                    }
                }
                p
            }
        };
        (exact_measure(s, &point, tol).deficiency >= 1).then_some(point)
    };
    let (line_seeds, point_seeds): (Vec<_>, Vec<_>) = seeds.into_iter().partition(|s| s.0 < 2);
    let mut found: Vec<Vec<f64>> = line_seeds.par_iter().filter_map(search).collect();
    // Isolated minima already explained by a nearby curve point need no 2D search.
    let covered: HashSet<(usize, usize)> = found
        .iter()
        .map(|p| {
            (
                ((p[0] * n as f64).round() as usize) % n,
                ((p[1] * n as f64).round() as usize) % n,
            )
        })
        .collect();
    let point_seeds: Vec<_> = point_seeds
        .into_iter()
        .filter(|&(_, i, j)| {
            !(0..5).any(|a| {
                (0..5).any(|b| covered.contains(&((i + n + a - 2) % n, (j + n + b - 2) % n)))
            })
        })
        .collect();
    found.extend(
        point_seeds
            .par_iter()
            .filter_map(search)
            .collect::<Vec<_>>(),
    );

    let grid_hits: Vec<Phase> = hits.iter().map(|s| Phase::from_f64(&s.t)).collect();
    let mut out: Vec<SpectrumSample> = Vec::new();
    for p in found {
        let ph = Phase::from_f64(&p);
        if grid_hits.iter().any(|g| g.distance(&ph) <= 1e-9) {
            continue;
        }
        if out
            .iter()
            .any(|o| Phase::from_f64(&o.t).distance(&ph) <= 1e-9)
        {
            continue;
        }
        let v = exact_measure(s, &p, tol);
        out.push(SpectrumSample {
            t: p,
            index: None,
            sigma_min: v.sigma_min,
            deficiency: v.deficiency,
        });
    }
    out.sort_by(|a, b| a.t[0].total_cmp(&b.t[0]).then(a.t[1].total_cmp(&b.t[1])));
    out
}

/// Exactly one wrap-adjacent cluster of hits, all within one cell of the origin.
fn singleton(hits: &[SpectrumSample], curve: &[SpectrumSample], n: usize, d: usize) -> bool {
    let cells: Vec<Vec<usize>> = hits
        .iter()
        .map(|s| s.index.clone().unwrap())
        .chain(curve.iter().map(|s| {
            s.t.iter()
                .map(|x| ((x * n as f64).round() as usize) % n)
                .collect()
        }))
        .collect();
    if cells.is_empty() {
        return false;
    }
    let near_origin = cells.iter().all(|c| c.iter().all(|&i| i.min(n - i) <= 1));
    if !near_origin {
        return false;
    }
    let adjacent = |a: &[usize], b: &[usize]| {
        a.iter().zip(b).all(|(&x, &y)| {
            let dx = (x + n - y) % n;
            dx.min(n - dx) <= 1
        })
    };
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..cells.len() {
            if !seen[j] && adjacent(&cells[i], &cells[j]) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    let _ = d;
    seen.iter().all(|&s| s)
}
