//! Complex polynomial and rational-function algebra.

mod point;
mod poly;
mod quadrature;
mod rational;
mod roots;

pub use point::{pair, ExtComplex, C64};
pub use poly::{series_div, Polynomial};
pub use quadrature::{
    factorial, partial_fractions, QuadratureData, QuadratureNode, QuadratureTerm, POLE_MERGE_TOL,
};
pub use rational::{PrincipalPart, RationalFunction};
pub use roots::poly_roots;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("root finder did not converge after {iterations} iterations (residuals {residuals:?})")]
    NonConvergence { iterations: usize, residuals: Vec<f64> },
    #[error("poles closer than the merge tolerance (separation {separation:e})")]
    NearCoincidentPoles { separation: f64 },
    #[error("degree {degree} below the required {required}")]
    DegreeTooLow { degree: usize, required: usize },
    #[error("denominator is identically zero")]
    ZeroDenominator,
}

/// Convenience constructor.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
