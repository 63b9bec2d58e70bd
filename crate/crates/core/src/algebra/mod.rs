//! Scalars, Laurent polynomials and determinants.

pub mod determinant;
pub mod exact;
pub mod laurent;
pub mod parse;

pub use determinant::{
    bareiss, cofactor_determinant, interpolate_determinant, laurent_determinant, PolyMatrix,
};
pub use exact::{rat, ExactReal, Rational};
pub use laurent::{
    factored_display, linear_factor_candidates, split_linear_factors, variable_names, Coefficient,
    Exponent, LaurentPoly, UnitNormalForm,
};
pub use parse::{parse_polynomial, parse_scalar};

pub fn exact_product(a: &ExactReal, b: &ExactReal) -> ExactReal {
    a * b
}

pub fn exact_inverse(a: &ExactReal) -> crate::Result<ExactReal> {
    a.inverse()
}
