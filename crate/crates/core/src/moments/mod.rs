//! Exact Dirichlet, Dirichlet–Ferguson and Poisson moments, and a quadrature
//! oracle to check the Dirichlet ones against.

mod poisson;
mod quadrature;
mod recurrence;
mod table;

pub use poisson::{poisson_moment, poisson_raw_moment};
pub use quadrature::{
    oracle_applies, simplex_quadrature_oracle, GaussJacobi, SimplexPolynomial, SimplexQuadrature,
    CONVERGENCE_TOLERANCE, MIN_RESOLUTION,
};
pub use recurrence::{
    cycle_index, df_moment, dirichlet_moment, dirichlet_moment_multilinear, dirichlet_moments_upto,
    exact_cell_masses, hadamard_power_dot, partition_moment, PowerSums, MAX_MULTILINEAR_FACTORS,
};
pub use table::{moment_table, write_moment_csv, MomentRow, TABLE_TOLERANCE};
