//! Two-sided Monte Carlo checks of the Mecke-type identities for the Poisson
//! process, the gamma measure, the Dirichlet–Ferguson measure and the
//! Dirichlet distribution, plus Laplace transforms and the simplicial
//! decomposition of the gamma measure.
//!
//! Left- and right-hand sides run on independent substreams (`0` and `1` of
//! the case stream) and pass when they agree within three combined standard
//! errors.

mod case;
mod estimate;
mod exact;
mod laplace;
mod report;
mod simplicial;
mod suite;

pub use case::{Identity, IdentityCase, RhsSampling, MIN_SAMPLES};
pub use estimate::{estimate_lhs, estimate_rhs};
pub use exact::exact_value;
pub use laplace::{laplace_closed_form, verify_laplace, LaplaceKind};
pub use report::{verify_identity, VerificationReport, EXACT_SIGMAS, EXACT_SLACK, PASS_SIGMAS};
pub use simplicial::{
    verify_simplicial_decomposition, DecompositionCheck, DecompositionReport, MAX_BIAS,
};
pub use suite::{
    default_suite, run_case, run_suite, suite_cases, suite_functionals, suite_partition,
    write_reports_csv, write_suite_csv, SuiteEntry, SuiteReport, FUNCTIONALS_PER_ARITY,
    RERUN_STREAM, SUITE_BETAS,
};
