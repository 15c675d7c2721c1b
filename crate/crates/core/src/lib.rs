//! Simulation and verification toolkit for random measures on `[0, 1]`.
//!
//! The crate samples Poisson point processes, gamma measures and
//! Dirichlet–Ferguson measures, checks their Mecke-type integral identities by
//! two-sided Monte Carlo, and computes exact Dirichlet moments from their
//! recurrences, cross-checked against direct quadrature of the Dirichlet
//! density.
//!
//! Measures and samplers are generic over [`Real`] (`f32` or `f64`); moment
//! recurrences are generic over [`Field`] (`f64` or exact [`Rational`]). The
//! aliases below fix the common choices.

// `!(x > 0)` is deliberate throughout: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixedpoint;
pub mod measure;
pub mod mecke;
pub mod moments;
pub mod parallel;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::{Field, Real};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;

pub type Measure = measure::DiscreteMeasure<f64>;
pub type Intensity = measure::IntensityMeasure<f64>;
pub type CellPartition = measure::Partition<f64>;
pub type Functional = measure::TestFunctional<f64>;
pub type Simplex = measure::SimplexVector<f64>;
