//! `ν ↦ (ν/ν(X), ν(X))` sends the gamma measure to `𝒟_σ ⊗ Gam[β, 1]`.
//!
//! Checked on samples from the Lévy-truncated sampler, so the primary gamma
//! sampler (built from that very product) plays no part.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measure::{IntensityMeasure, Partition};
use crate::parallel::monte_carlo_multi;
use crate::rng::RngStream;
use crate::samplers::sample_gamma_measure_levy;
use crate::stats::Estimate;

/// Largest truncation bias tolerated before a cutoff counts as too coarse,
/// relative for total-mass moments and absolute for normalized ones.
pub const MAX_BIAS: f64 = 1e-2;
const SIGMAS: f64 = 3.0;
const MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionCheck {
    pub name: String,
    pub observed: f64,
    pub std_err: f64,
    pub expected: f64,
    /// Allowance for the truncation bias, added to `3·stdErr`.
    pub bias_allowance: f64,
    pub z_score: f64,
    pub pass: bool,
}

impl DecompositionCheck {
    fn new(name: String, observed: Estimate, expected: f64, bias: f64) -> Self {
        let diff = observed.mean - expected;
        let z_score = if observed.std_err > 0.0 {
            diff / observed.std_err
        } else {
            0.0
        };
        Self {
            name,
            observed: observed.mean,
            std_err: observed.std_err,
            expected,
            bias_allowance: bias,
            z_score,
            pass: diff.abs() <= SIGMAS * observed.std_err + bias,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionReport {
    pub beta: f64,
    pub levy_cutoff: f64,
    pub sample_count: usize,
    pub checks: Vec<DecompositionCheck>,
    pub pass: bool,
}

/// `E[r^n]`, `r ~ Gam[β, 1]`.
fn gamma_moment(beta: f64, n: usize) -> f64 {
    (0..n).map(|m| beta + m as f64).product()
}

/// Raw moments 1..3 of the total mass with atoms below `ε` removed. The
/// cumulants are `κ_n = β Γ(n, ε)`.
fn truncated_mass_moments(beta: f64, eps: f64) -> [f64; 3] {
    let e = (-eps).exp();
    let k1 = beta * e;
    let k2 = beta * (1.0 + eps) * e;
    let k3 = beta * (2.0 + 2.0 * eps + eps * eps) * e;
    [k1, k2 + k1 * k1, k3 + 3.0 * k2 * k1 + k1 * k1 * k1]
}

/// `E[log(1 + ε/r)]` for `r ~ Gam[β, 1]`, by the trapezoid rule in `log r`.
fn expected_log_ratio(beta: f64, eps: f64) -> f64 {
    let lo = eps.ln() - 60.0 / beta - 10.0;
    let hi = (beta + 60.0).ln() + 1.0;
    let n = 200_000;
    let h = (hi - lo) / n as f64;
    let norm = ln_gamma(beta);
    let f = |u: f64| (eps * (-u).exp()).ln_1p() * (beta * u - u.exp() - norm).exp();
    let inner: f64 = (1..n).map(|i| f(lo + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(lo) + f(hi)))
}

/// Moments of total mass and normalized cell masses, and their correlation,
/// against `Gam[β, 1]` and `Dir[ev_𝔛(σ)]`.
///
/// Dropping atoms below `ε` biases the total-mass moments by a known amount.
/// For the normalized part, with `D` the dropped mass and `r` the full
/// total, each normalized cell mass moves by at most `2D/r`, and
/// `E[D/r] ≤ β E[log(1 + ε/r)]`; order-`n` moments move by at most `n` times
/// that.
pub fn verify_simplicial_decomposition(
    sigma: &IntensityMeasure<f64>,
    sample_count: usize,
    partition: &Partition<f64>,
    levy_cutoff: f64,
    rng: &RngStream,
) -> Result<DecompositionReport> {
    partition.validate_for(sigma)?;
    if !(levy_cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Lévy cutoff {levy_cutoff} must be positive"
        )));
    }
    let beta = sigma.beta();
    let k = partition.cells();
    let alpha = partition.sigma_masses(sigma);
    let mean_cells: Vec<f64> = alpha.iter().map(|a| a / beta).collect();

    let truncated = truncated_mass_moments(beta, levy_cutoff);
    let mass_bias: Vec<f64> = (1..=MAX_ORDER)
        .map(|n| (truncated[n - 1] - gamma_moment(beta, n)).abs())
        .collect();
    let cell_bias_unit = 2.0 * beta * expected_log_ratio(beta, levy_cutoff);
    let too_coarse = mass_bias
        .iter()
        .enumerate()
        .any(|(i, b)| *b > MAX_BIAS * gamma_moment(beta, i + 1))
        || cell_bias_unit * MAX_ORDER as f64 > MAX_BIAS;
    if too_coarse {
        return Err(Error::InvalidParameter(format!(
            "Lévy cutoff {levy_cutoff} is too coarse: truncation bias exceeds {MAX_BIAS}"
        )));
    }

    // Layout: r, r², r³, then per cell y, y², y³, r·y.
    let dims = MAX_ORDER + 4 * k;
    let acc = monte_carlo_multi(sample_count, rng, dims, |r, out| {
        let nu = sample_gamma_measure_levy(sigma, levy_cutoff, r)?;
        let total = nu.total_mass();
        let cells = partition.cell_masses(&nu);
        out[0] = total;
        out[1] = total * total;
        out[2] = total * total * total;
        for c in 0..k {
            // An empty sample has no normalization; the bound above covers
            // any choice, so use the mean.
            let y = if total > 0.0 {
                cells[c] / total
            } else {
                mean_cells[c]
            };
            let base = MAX_ORDER + 4 * c;
            out[base] = y;
            out[base + 1] = y * y;
            out[base + 2] = y * y * y;
            out[base + 3] = total * y;
        }
        Ok(())
    })?;

    let mut checks = Vec::new();
    for n in 1..=MAX_ORDER {
        checks.push(DecompositionCheck::new(
            format!("total_mass_moment_{n}"),
            acc[n - 1].estimate(),
            gamma_moment(beta, n),
            mass_bias[n - 1],
        ));
    }
    for c in 0..k {
        let base = MAX_ORDER + 4 * c;
        for n in 1..=MAX_ORDER {
            // Beta(α_c, β − α_c) moments.
            let expected: f64 = (0..n)
                .map(|m| (alpha[c] + m as f64) / (beta + m as f64))
                .product();
            checks.push(DecompositionCheck::new(
                format!("cell_{c}_moment_{n}"),
                acc[base + n - 1].estimate(),
                expected,
                n as f64 * cell_bias_unit,
            ));
        }
    }
    let n = sample_count as f64;
    let r = &acc[0];
    for c in 0..k {
        let base = MAX_ORDER + 4 * c;
        let y = &acc[base];
        let cov = (acc[base + 3].mean() - r.mean() * y.mean()) * n / (n - 1.0);
        let denom = (r.variance() * y.variance()).sqrt();
        let corr = if denom > 0.0 { cov / denom } else { 0.0 };
        // Under independence the sample correlation has standard error 1/√n.
        let est = Estimate {
            mean: corr,
            std_err: 1.0 / n.sqrt(),
            count: sample_count as u64,
        };
        checks.push(DecompositionCheck::new(
            format!("cell_{c}_correlation"),
            est,
            0.0,
            0.0,
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(DecompositionReport {
        beta,
        levy_cutoff,
        sample_count,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_moments_approach_gamma() {
        for beta in [0.5, 1.0, 2.0] {
            let m = truncated_mass_moments(beta, 1e-12);
            for n in 1..=3 {
                assert!((m[n - 1] - gamma_moment(beta, n)).abs() < 1e-9);
            }
        }
        assert_eq!(gamma_moment(2.0, 3), 24.0);
    }

    #[test]
    fn log_ratio_against_simple_bounds() {
        // For β > 1, E[log(1 + ε/r)] ≤ ε E[1/r] = ε/(β − 1), close for small ε.
        let v = expected_log_ratio(2.0, 1e-4);
        assert!(v <= 1e-4 && v > 0.99e-4, "{v}");
        // For β = 1 it is ∫_0^ε e^u E₁(u) du ≈ ε(log(1/ε) + 1 − γ_E).
        let w = expected_log_ratio(1.0, 1e-4);
        let approx = 1e-4 * ((1e4f64).ln() + 1.0 - 0.577_215_664_901_532_9);
        assert!((w / approx - 1.0).abs() < 1e-3, "{w} vs {approx}");
    }

    #[test]
    fn rejects_coarse_cutoff() {
        let sigma = IntensityMeasure::uniform(1.0).unwrap();
        let p = Partition::uniform(2).unwrap();
        let rng = RngStream::new(1, 0);
        assert!(verify_simplicial_decomposition(&sigma, 1000, &p, 0.5, &rng).is_err());
        assert!(verify_simplicial_decomposition(&sigma, 1000, &p, 0.0, &rng).is_err());
    }
}
