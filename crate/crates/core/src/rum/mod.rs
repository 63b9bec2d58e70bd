//! Rigid unit mode spectra and crystal polynomials.

pub mod component;
pub mod output;
pub mod polynomial;
pub mod spectrum;
pub mod supercell;

pub use crate::framework::sublattice::spectrum_rescale_image;
pub use component::{verify_linear_component, Component, ComponentCheck};
pub use output::{spectrum_csv, spectrum_summary, spectrum_svg};
pub use polynomial::{
    crystal_polynomial, has_local_flex, identity_points, verify_factorization, CrystalPolynomial,
    FactorizationCheck,
};
pub use spectrum::{
    default_resolution, in_spectrum, rum_dimension_estimate, sample_spectrum,
    sample_symbol_spectrum, SpectrumOptions, SpectrumReport, SpectrumSample,
};
pub use supercell::{nontrivial_supercell_flexes, supercell_flex_search, SupercellFlex};
