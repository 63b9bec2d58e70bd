//! Candidate components of the spectrum and their verification against samples.

use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spectrum::SpectrumReport;
use crate::algebra::parse_scalar;
use crate::error::{Error, Result};
use crate::framework::CrystalFramework;
use crate::linalg;
use crate::symbol::build_symbol;

pub const LINE_TOL: f64 = 1e-6;
pub const RELATION_TOL: f64 = 1e-3;
const COMPONENT_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    /// `normal · t ≡ offset (mod 1)`.
    Line { normal: Vec<i64>, offset: f64 },
    /// `Re w = a·Re z + 1 − a` on the two-torus.
    RealPartRelation { a: f64 },
}

fn wrap_dist(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    y.min(1.0 - y)
}

impl Component {
    pub fn line(normal: &[i64], offset: f64) -> Self {
        Component::Line {
            normal: normal.to_vec(),
            offset,
        }
    }

    /// Parses `line:1,-1:0` or `re:sqrt(3)-sqrt(2)`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse {
            input: text.to_string(),
            message: m.to_string(),
        };
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| bad("expected `line:` or `re:`"))?;
        match kind.trim() {
            "line" => {
                let (n, c) = rest.split_once(':').unwrap_or((rest, "0"));
                let normal = n
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|_| bad("bad normal vector"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if normal.iter().all(|&x| x == 0) {
                    return Err(bad("zero normal vector"));
                }
                Ok(Component::Line {
                    normal,
                    offset: parse_scalar::<f64>(c)?,
                })
            }
            "re" => Ok(Component::RealPartRelation {
                a: parse_scalar::<f64>(rest)?,
            }),
            _ => Err(bad("expected `line:` or `re:`")),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Component::Line { normal, .. } => Some(normal.len()),
            Component::RealPartRelation { .. } => Some(2),
        }
    }

    /// How far `t` is from satisfying the defining relation.
    pub fn residual(&self, t: &[f64]) -> f64 {
        match self {
            Component::Line { normal, offset } => {
                let s: f64 = normal.iter().zip(t).map(|(n, x)| *n as f64 * x).sum();
                wrap_dist(s - offset)
            }
            Component::RealPartRelation { a } => {
                ((TAU * t[1]).cos() - a * (TAU * t[0]).cos() - 1.0 + a).abs()
            }
        }
    }

    /// First-order distance from `t` to the component.
    pub fn distance(&self, t: &[f64]) -> f64 {
        match self {
            Component::Line { normal, .. } => {
                let n: f64 = normal
                    .iter()
                    .map(|x| (*x as f64).powi(2))
                    .sum::<f64>()
                    .sqrt();
                self.residual(t) / n
            }
            Component::RealPartRelation { a } => {
                let g =
                    TAU * (a * a * (TAU * t[0]).sin().powi(2) + (TAU * t[1]).sin().powi(2)).sqrt();
                let r = self.residual(t);
                if r == 0.0 {
                    0.0
                } else {
                    r / g.max(1e-300)
                }
            }
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Component::Line { .. } => LINE_TOL,
            Component::RealPartRelation { .. } => RELATION_TOL,
        }
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        self.residual(t) <= self.tolerance()
    }

    /// Points of `[0,1)^d` lying exactly on the component.
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        match self {
            Component::Line { normal, offset } => {
                let d = normal.len();
                let j = normal.iter().position(|&x| x != 0).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(17);
                (0..count)
                    .map(|i| {
                        let mut t: Vec<f64> = (0..d)
                            .map(|_| {
                                if d == 2 {
                                    i as f64 / count as f64
                                } else {
                                    rng.gen::<f64>()
                                }
                            })
                            .collect();
                        let rest: f64 = (0..d)
                            .filter(|&k| k != j)
                            .map(|k| normal[k] as f64 * t[k])
                            .sum();
                        t[j] = ((offset - rest) / normal[j] as f64).rem_euclid(1.0);
                        t
                    })
                    .collect()
            }
            Component::RealPartRelation { a } => {
                let mut out = Vec::new();
                for i in 0..count {
                    let t1 = i as f64 / count as f64;
                    let rhs = a * (TAU * t1).cos() + 1.0 - a;
                    if rhs.abs() <= 1.0 {
                        let t2 = rhs.acos() / TAU;
                        out.push(vec![t1, t2]);
                        if t2 > 0.0 {
                            out.push(vec![t1, 1.0 - t2]);
                        }
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Line { normal, offset } => {
                let n: Vec<String> = normal.iter().map(|x| x.to_string()).collect();
                write!(f, "line:{}:{}", n.join(","), offset)
            }
            Component::RealPartRelation { a } => write!(f, "re:{}", a),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCheck {
    pub holds: bool,
    pub sampled: usize,
    /// Sample points on the component that are not in the spectrum.
    pub sample_misses: Vec<Vec<f64>>,
    pub tube_hits: usize,
    /// Hits within half a grid cell of the component that violate its relation.
    pub tube_violations: Vec<Vec<f64>>,
}

pub fn verify_linear_component(
    c: &CrystalFramework,
    component: &Component,
    report: &SpectrumReport,
) -> Result<ComponentCheck> {
    if component.dim() != Some(c.dim()) {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: component.dim().unwrap_or(0),
        });
    }
    let s = build_symbol(c);
    let samples = component.sample_points(COMPONENT_SAMPLES);
    let sample_misses: Vec<Vec<f64>> = samples
        .iter()
        .filter(|t| {
            let sv = linalg::singular_values(&s.eval_f64(t, true));
            linalg::numerical_rank(&sv, report.tolerance) == s.cols()
        })
        .cloned()
        .collect();
    let half_cell = 0.5 / report.resolution as f64;
    let mut tube_hits = 0;
    let mut tube_violations = Vec::new();
    for h in report.hits.iter().chain(&report.curve_points) {
        if component.distance(&h.t) <= half_cell {
            tube_hits += 1;
            if !component.contains(&h.t) {
                tube_violations.push(h.t.clone());
            }
        }
    }
    Ok(ComponentCheck {
        holds: sample_misses.is_empty() && tube_violations.is_empty() && !samples.is_empty(),
        sampled: samples.len(),
        sample_misses,
        tube_hits,
        tube_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let l = Component::parse("line:1,-1:0").unwrap();
        assert_eq!(l, Component::line(&[1, -1], 0.0));
        assert_eq!(Component::parse(&l.to_string()).unwrap(), l);
        let r = Component::parse("re:sqrt(3)-sqrt(2)").unwrap();
        assert_eq!(
            r,
            Component::RealPartRelation {
                a: 3f64.sqrt() - 2f64.sqrt()
            }
        );
        assert!(Component::parse("line:0,0").is_err());
        assert!(Component::parse("circle:1").is_err());
    }

    #[test]
    fn samples_lie_on_component() {
        for comp in [
            Component::line(&[1, -2], 0.25),
            Component::line(&[0, 3], 0.5),
            Component::RealPartRelation { a: 0.3 },
        ] {
            let pts = comp.sample_points(32);
            assert!(!pts.is_empty());
            for t in pts {
                assert!(comp.residual(&t) < 1e-12, "{} {:?}", comp, t);
                assert!(t.iter().all(|x| (0.0..1.0).contains(x)));
            }
        }
    }

    #[test]
    fn residual_wraps() {
        let l = Component::line(&[1, -1], 0.0);
        assert!(l.residual(&[0.999_999_999, 0.0]) < 1e-8);
        assert!((l.distance(&[0.1, 0.0]) - 0.1 / 2f64.sqrt()).abs() < 1e-15);
    }
}
