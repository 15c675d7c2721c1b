//! Discrete measures on `[0, 1]`, intensities, partitions and test
//! functionals.
//!
//! A finite discrete measure `ν = Σ s_i δ_{x_i}` is stored as its list of
//! atoms `(x_i, s_i)`; that list is also the marked configuration
//! `Σ δ_{(s_i, x_i)}`, so no separate marked-point type is needed.

mod discrete;
mod functional;
mod intensity;
mod partition;

pub use discrete::{compensated_sum, Atom, DiscreteMeasure, MeasureKind};
pub use functional::{Arity, Expr, MonomialKey, TestFunctional};
pub use intensity::{DensitySpec, IntensityMeasure, IntensitySpec};
pub use partition::{evaluate_pairing, Partition, PiecewiseConstant, SimplexVector};

use crate::error::Result;
use crate::scalar::Real;

/// `ev_𝔛(η)`.
pub fn ev_partition<F: Real>(
    part: &Partition<F>,
    eta: &DiscreteMeasure<F>,
) -> Result<SimplexVector<F>> {
    part.ev(eta)
}

/// `η({x})`.
pub fn atom_mass_at<F: Real>(eta: &DiscreteMeasure<F>, x: F) -> F {
    eta.atom_mass_at(x)
}

/// `(1 − t)η + tδ_x`.
pub fn convex_step<F: Real>(eta: &DiscreteMeasure<F>, x: F, t: F) -> Result<DiscreteMeasure<F>> {
    eta.convex_step(x, t)
}
