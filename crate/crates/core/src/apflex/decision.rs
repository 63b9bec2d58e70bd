//! Flex checks for trigonometric fields and the almost periodic rigidity decision.

use std::fmt;

use super::trig::{FrequencyAtom, TrigField};
use crate::error::{Error, Result};
use crate::framework::{generate_patch, CrystalFramework, PatchSpec};
use crate::linalg::{self, CVector};
use crate::phase::Phase;
use crate::rum::{sample_spectrum, Component, SpectrumOptions, SpectrumReport};
use crate::symbol::{
    build_symbol, periodic_rigidity_test, real_representative, rigidity_residual_on_patch,
    PeriodicRigidity,
};

pub const PATCH_TOL: f64 = 1e-10;
pub const ATOM_TOL: f64 = 1e-8;
pub const COMPONENT_TUBE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct AtomCheck {
    pub t: Phase,
    /// `‖Φ(ω̄)a‖`.
    pub residual: f64,
    pub passes: bool,
}

#[derive(Clone, Debug)]
pub struct ApFlexReport {
    pub patch_residual: f64,
    pub patch_passes: bool,
    pub atoms: Vec<AtomCheck>,
    /// Indices of atoms that are not phase-periodic flexes.
    pub failing_atoms: Vec<usize>,
    pub is_flex: bool,
    /// The patch test and the per-atom test agree.
    pub consistent: bool,
}

pub fn ap_flex_check(
    c: &CrystalFramework,
    g: &TrigField,
    patch: &PatchSpec,
) -> Result<ApFlexReport> {
    if g.dim() != c.dim() || g.width() != c.dof() {
        return Err(Error::DimensionMismatch {
            expected: c.dof(),
            found: g.width(),
        });
    }
    let p = generate_patch(c, patch);
    let patch_residual = rigidity_residual_on_patch(c, &p, &g.velocity())?.sup_norm;
    let s = build_symbol(c);
    let atoms: Vec<AtomCheck> = g
        .atoms()
        .iter()
        .map(|a| {
            let residual = (s.eval(&a.t, true) * &a.a).norm();
            AtomCheck {
                t: a.t.clone(),
                residual,
                passes: residual <= ATOM_TOL,
            }
        })
        .collect();
    let failing_atoms: Vec<usize> = atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.passes)
        .map(|(i, _)| i)
        .collect();
    let patch_passes = patch_residual <= PATCH_TOL;
    Ok(ApFlexReport {
        patch_residual,
        patch_passes,
        consistent: patch_passes == failing_atoms.is_empty(),
        is_flex: patch_passes && failing_atoms.is_empty(),
        atoms,
        failing_atoms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApVerdict {
    Rigid,
    NotRigid,
}

impl fmt::Display for ApVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ApVerdict::Rigid => "RIGID",
            ApVerdict::NotRigid => "NOT RIGID",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Witness {
    /// A strictly periodic flex that is not a translation.
    StrictlyPeriodic { flex: CVector },
    /// A spectrum point away from `1̂` and a flex `b` with `u = b ⊗ e_ω`.
    SpectrumHit {
        t: Vec<f64>,
        sigma_min: f64,
        flex: CVector,
    },
}

#[derive(Clone, Debug)]
pub struct ApRigidity {
    pub verdict: ApVerdict,
    pub periodic: PeriodicRigidity,
    pub singleton: bool,
    pub spectrum_hits: usize,
    pub resolution: usize,
    pub tolerance: f64,
    /// Every failing condition contributes one witness.
    pub witnesses: Vec<Witness>,
}

impl ApRigidity {
    pub fn periodic_witness(&self) -> Option<&CVector> {
        self.witnesses.iter().find_map(|w| match w {
            Witness::StrictlyPeriodic { flex } => Some(flex),
            _ => None,
        })
    }

    pub fn spectrum_witness(&self) -> Option<(&[f64], &CVector)> {
        self.witnesses.iter().find_map(|w| match w {
            Witness::SpectrumHit { t, flex, .. } => Some((t.as_slice(), flex)),
            _ => None,
        })
    }
}

fn smallest_right_vector(m: &linalg::CMatrix) -> (f64, CVector) {
    let dec = linalg::decompose(m);
    let i = dec.singular_values.len() - 1;
    (dec.singular_values[i], dec.right_vectors[i].clone())
}

fn origin_distance(t: &[f64]) -> f64 {
    t.iter().map(|x| x.min(1.0 - x)).fold(0.0, f64::max)
}

/// Rigid exactly when the framework is strictly periodically rigid and the
/// sampled spectrum is the singleton `{1̂}`.
pub fn ap_rigidity_decision(c: &CrystalFramework, opts: &SpectrumOptions) -> ApRigidity {
    let periodic = periodic_rigidity_test(c, opts.tolerance);
    let report = sample_spectrum(c, opts);
    ap_rigidity_from(c, periodic, &report)
}

pub fn ap_rigidity_from(
    c: &CrystalFramework,
    periodic: PeriodicRigidity,
    report: &SpectrumReport,
) -> ApRigidity {
    let singleton = report.singleton_flag;
    let mut witnesses = Vec::new();
    if let Some(flex) = periodic.witness.clone().filter(|_| !periodic.rigid) {
        witnesses.push(Witness::StrictlyPeriodic { flex });
    }
    if !singleton {
        let mut best: Option<&crate::rum::SpectrumSample> = None;
        for h in report.all_hits() {
            if best.is_none_or(|b| origin_distance(&h.t) > origin_distance(&b.t) + 1e-12) {
                best = Some(h);
            }
        }
        if let Some(h) = best {
            let m = build_symbol(c).eval_f64(&h.t, true);
            let (sigma_min, v) = smallest_right_vector(&m);
            witnesses.push(Witness::SpectrumHit {
                t: h.t.clone(),
                sigma_min,
                flex: real_representative(&v),
            });
        }
    }
    let verdict = if periodic.rigid && singleton {
        ApVerdict::Rigid
    } else {
        ApVerdict::NotRigid
    };
    ApRigidity {
        verdict,
        singleton,
        spectrum_hits: report.hit_count(),
        resolution: report.resolution,
        tolerance: report.tolerance,
        witnesses,
        periodic,
    }
}

fn fmt_vector(v: &CVector) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|x| {
            if x.im == 0.0 {
                format!("{:.6}", x.re)
            } else {
                format!("{:.6}{:+.6}i", x.re, x.im)
            }
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

impl fmt::Display for ApRigidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "almost periodic rigidity: {}", self.verdict)?;
        writeln!(
            f,
            "strictly periodic rigidity: {} (rank {} of {})",
            if self.periodic.rigid { "yes" } else { "no" },
            self.periodic.rank,
            self.periodic.expected_rank
        )?;
        writeln!(
            f,
            "spectrum singleton: {} ({} hits at resolution {}, tolerance {:e})",
            if self.singleton { "yes" } else { "no" },
            self.spectrum_hits,
            self.resolution,
            self.tolerance
        )?;
        if self.witnesses.is_empty() {
            writeln!(f, "witness: none")?;
        }
        for w in &self.witnesses {
            match w {
                Witness::StrictlyPeriodic { flex } => {
                    writeln!(f, "witness: strictly periodic flex {}", fmt_vector(flex))?
                }
                Witness::SpectrumHit { t, sigma_min, flex } => {
                    let t: Vec<String> = t.iter().map(|x| format!("{:.6}", x)).collect();
                    writeln!(
                        f,
                        "witness: spectrum point t = ({}), sigma_min = {:e}, flex {}",
                        t.join(", "),
                        sigma_min,
                        fmt_vector(flex)
                    )?
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ComponentPart {
    /// Position in the component list.
    pub component: usize,
    pub field: TrigField,
    /// Indices into the original field's atoms.
    pub atoms: Vec<usize>,
}

impl ComponentPart {
    pub fn invariant_under(&self, n: &[i64]) -> bool {
        self.field.invariant_under(n)
    }
}

/// Assigns each atom to the first component containing its phase; empty
/// parts are omitted.
pub fn decompose_by_spectrum_components(
    g: &TrigField,
    components: &[Component],
) -> Result<Vec<ComponentPart>> {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); components.len()];
    for (i, atom) in g.atoms().iter().enumerate() {
        let t = atom.t.to_f64();
        let j = components
            .iter()
            .position(|c| c.dim() == Some(g.dim()) && c.residual(&t) <= COMPONENT_TUBE)
            .ok_or(Error::UncoveredAtom(i))?;
        groups[j].push(i);
    }
    groups
        .into_iter()
        .enumerate()
        .filter(|(_, idx)| !idx.is_empty())
        .map(|(j, idx)| {
            let atoms: Vec<FrequencyAtom> = idx.iter().map(|&i| g.atoms()[i].clone()).collect();
            Ok(ComponentPart {
                component: j,
                field: TrigField::new(g.dim(), g.width(), atoms)?,
                atoms: idx,
            })
        })
        .collect()
}
