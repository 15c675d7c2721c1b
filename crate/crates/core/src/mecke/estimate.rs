//! Per-sample statistics of both sides of each identity.
//!
//! Left-hand sides integrate over the atoms of the sampled measure exactly.
//! Right-hand sides perturb the sampled measure; since every functional
//! depends on the measure only through cell masses, the perturbation is
//! applied to the pairings `⟨g_i, η⟩` directly.

use super::case::{Identity, IdentityCase, RhsSampling};
use crate::error::Result;
use crate::parallel::monte_carlo;
use crate::rng::RngStream;
use crate::samplers::{
    beta_one_from_uniform, open_unit, sample_dirichlet, sample_dirichlet_ferguson, sample_exp1,
    sample_gamma_measure, sample_poisson_pp,
};
use crate::stats::Estimate;

pub(crate) const LHS_STREAM: u64 = 0;
pub(crate) const RHS_STREAM: u64 = 1;

/// Monte Carlo estimate of the left-hand side.
pub fn estimate_lhs(case: &IdentityCase) -> Result<Estimate> {
    let rng = case.rng.substream(LHS_STREAM);
    monte_carlo(case.sample_count, &rng, |r| lhs_sample(case, r))
}

/// Monte Carlo estimate of the right-hand side.
pub fn estimate_rhs(case: &IdentityCase) -> Result<Estimate> {
    let rng = case.rng.substream(RHS_STREAM);
    monte_carlo(case.sample_count, &rng, |r| rhs_sample(case, r))
}

/// `(t, weight)` under the case's sampling scheme.
fn draw_t(sampling: RhsSampling, beta: f64, r: &mut RngStream) -> (f64, f64) {
    let v: f64 = open_unit(r);
    match sampling {
        RhsSampling::Beta => (beta_one_from_uniform(beta, v), 1.0),
        RhsSampling::UniformReweighted => (1.0 - v, beta * v.powf(beta - 1.0)),
    }
}

pub(crate) fn lhs_sample(case: &IdentityCase, r: &mut RngStream) -> Result<f64> {
    let f = &case.functional;
    let sigma = &case.sigma;
    Ok(match case.identity {
        Identity::PoissonMecke => f.integrate_over_atoms(&sample_poisson_pp(sigma, r)?),
        Identity::GammaMecke => {
            f.integrate_over_atoms(&sample_gamma_measure(sigma, &case.stick_breaking, r)?)
        }
        Identity::DfMeckeG => {
            let eta = sample_dirichlet_ferguson(sigma, &case.stick_breaking, r)?;
            eta.total_mass() * f.eval_g(&eta)
        }
        Identity::DfMeckeF | Identity::DfMeckeR => {
            f.integrate_over_atoms(&sample_dirichlet_ferguson(sigma, &case.stick_breaking, r)?)
        }
        Identity::FiniteDimG => {
            let y = sample_dirichlet(&case.alpha, r)?;
            let y = y.components();
            let size: f64 = y.iter().sum();
            size * f.eval_with(&f.pairings_on_cells(y), None, 0.0)
        }
        Identity::FiniteDimF => {
            let y = sample_dirichlet(&case.alpha, r)?;
            let y = y.components();
            let p = f.pairings_on_cells(y);
            y.iter()
                .enumerate()
                .map(|(i, yi)| yi * f.eval_with(&p, Some(i), 0.0))
                .sum()
        }
    })
}

pub(crate) fn rhs_sample(case: &IdentityCase, r: &mut RngStream) -> Result<f64> {
    let f = &case.functional;
    let sigma = &case.sigma;
    let part = f.partition();
    let beta = sigma.beta();
    // ⟨g_i, ·⟩ of the perturbed measure from the unperturbed pairings.
    let shifted = |p: &[f64], cell: usize, keep: f64, add: f64| -> Vec<f64> {
        p.iter()
            .zip(f.functions())
            .map(|(pi, s)| keep * pi + add * s[cell])
            .collect()
    };
    Ok(match case.identity {
        Identity::PoissonMecke => {
            let gamma = sample_poisson_pp(sigma, r)?;
            let c = part.cell_of(sigma.sample_location(r));
            beta * f.eval_with(&shifted(&f.pairings(&gamma), c, 1.0, 1.0), Some(c), 0.0)
        }
        Identity::GammaMecke => {
            let nu = sample_gamma_measure(sigma, &case.stick_breaking, r)?;
            let c = part.cell_of(sigma.sample_location(r));
            let s: f64 = sample_exp1(r);
            beta * f.eval_with(&shifted(&f.pairings(&nu), c, 1.0, s), Some(c), 0.0)
        }
        Identity::DfMeckeG | Identity::DfMeckeF | Identity::DfMeckeR => {
            let eta = sample_dirichlet_ferguson(sigma, &case.stick_breaking, r)?;
            let c = part.cell_of(sigma.sample_location(r));
            let (t, w) = draw_t(case.rhs_sampling, beta, r);
            let p = shifted(&f.pairings(&eta), c, 1.0 - t, t);
            let cell = (case.identity != Identity::DfMeckeG).then_some(c);
            w * f.eval_with(&p, cell, t)
        }
        Identity::FiniteDimG | Identity::FiniteDimF => {
            let y = sample_dirichlet(&case.alpha, r)?;
            let i = part.cell_of(sigma.sample_location(r));
            let (t, w) = draw_t(case.rhs_sampling, beta, r);
            let p = shifted(&f.pairings_on_cells(y.components()), i, 1.0 - t, t);
            let cell = (case.identity == Identity::FiniteDimF).then_some(i);
            w * f.eval_with(&p, cell, 0.0)
        }
    })
}
