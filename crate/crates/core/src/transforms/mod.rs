//! Cauchy transforms and logarithmic potentials of area measures, and the identity checks
//! built on them.

mod kernels;
mod raster;
mod verify;

pub use kernels::{
    cauchy_cell, cauchy_disc, cauchy_raster, log_cell, log_potential_disc, log_potential_raster, Density,
};
pub use raster::{coverage_weights, distance_transform, fill_polylines, write_pgm, Grid, RasterDroplet};
pub use verify::{
    complement_cauchy_samples, fit_quadrature_function, fit_rational, verify_equilibrium, verify_schwarz_identity,
    ComplementRaster, Equilibrium, RationalFit, SchwarzResidual, TransformError,
};
