//! Supercell-periodic flexes: phases whose characters are trivial on a sublattice.

use crate::error::Result;
use crate::framework::{CrystalFramework, IntegerSublattice};
use crate::linalg::{self, CVector};
use crate::phase::Phase;
use crate::symbol::{build_symbol, translation_basis};

#[derive(Clone, Debug)]
pub struct SupercellFlex {
    pub phase: Phase,
    pub basis: Vec<CVector>,
    /// True when the space is spanned by translations (only possible at `1̂`).
    pub translation_only: bool,
}

/// Runs over the `|det M|` phases with `ω^{Mk} = 1` and keeps those where
/// `Φ(ω̄)` has a null space. Any entry that is not translation-only is a
/// nontrivial flex periodic under `MZ^d`.
pub fn supercell_flex_search(
    c: &CrystalFramework,
    s: &IntegerSublattice,
    tol: f64,
) -> Result<Vec<SupercellFlex>> {
    let sym = build_symbol(c);
    let trans = translation_basis(c.dim(), c.num_vertices());
    let mut out = Vec::new();
    for phase in s.dual_phases() {
        let basis = linalg::null_space(&sym.eval(&phase, true), tol);
        if basis.is_empty() {
            continue;
        }
        let translation_only = phase.is_zero() && {
            let rest: Vec<CVector> = basis
                .iter()
                .map(|b| linalg::project_out(b, &trans))
                .collect();
            linalg::orthonormalize(&rest, 1e-6).is_empty()
        };
        out.push(SupercellFlex {
            phase,
            basis,
            translation_only,
        });
    }
    Ok(out)
}

pub fn nontrivial_supercell_flexes(
    found: &[SupercellFlex],
) -> impl Iterator<Item = &SupercellFlex> {
    found.iter().filter(|f| !f.translation_only)
}
