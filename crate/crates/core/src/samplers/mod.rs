//! Samplers for the classical distributions and the three random measures.
//!
//! Every sampler is a pure function of its parameters and the random stream
//! it is handed.

mod expint;
mod measures;
mod variates;

pub use expint::exp_integral_e1;
pub use measures::{
    sample_dirichlet_ferguson, sample_gamma_measure, sample_gamma_measure_levy, sample_poisson_pp,
    StickBreakingConfig,
};
pub(crate) use variates::{beta_one_from_uniform, open_unit};
pub use variates::{
    sample_beta_one, sample_beta_rv, sample_dirichlet, sample_exp1, sample_gamma_rv,
    sample_poisson_count,
};
