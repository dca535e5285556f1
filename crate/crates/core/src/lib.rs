//! Quadrature domains, algebraic droplets and Hele-Shaw chains.
pub mod domains;
pub mod dynamics;
pub mod heleshaw;
pub mod numerics;
pub mod quadcheck;
pub mod scenario;
pub mod topology;
pub mod transforms;
