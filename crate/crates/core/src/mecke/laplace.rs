use serde::{Deserialize, Serialize};

use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::measure::{IntensityMeasure, PiecewiseConstant};
use crate::parallel::monte_carlo;
use crate::rng::RngStream;
use crate::samplers::{sample_gamma_measure, sample_poisson_pp, StickBreakingConfig};
use crate::stats::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceKind {
    Poisson,
    Gamma,
}

impl LaplaceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LaplaceKind::Poisson => "poisson_laplace",
            LaplaceKind::Gamma => "gamma_laplace",
        }
    }
}

/// `E[exp⟨f, ·⟩]` in closed form from the cell masses `σ(X_c)`:
///
/// - Poisson: `exp Σ_c σ(X_c)(e^{f_c} − 1)`,
/// - gamma: `exp(−Σ_c σ(X_c) log(1 − f_c))`, needing `f < 1`.
pub fn laplace_closed_form(
    kind: LaplaceKind,
    sigma: &IntensityMeasure<f64>,
    f: &PiecewiseConstant<f64>,
) -> Result<f64> {
    f.partition().validate_for(sigma)?;
    let masses = f.partition().sigma_masses(sigma);
    let cells = masses.iter().zip(f.coefficients());
    let exponent: f64 = match kind {
        LaplaceKind::Poisson => cells.map(|(m, &fc)| m * fc.exp_m1()).sum(),
        LaplaceKind::Gamma => {
            if let Some(fc) = f.coefficients().iter().find(|&&fc| fc >= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "gamma Laplace transform needs f < 1, got {fc}"
                )));
            }
            cells.map(|(m, &fc)| -m * (-fc).ln_1p()).sum()
        }
    };
    Ok(exponent.exp())
}

/// Empirical `E[exp⟨f, ·⟩]` against its closed form.
///
/// The gamma estimate has finite variance only for `f < 1/2`.
pub fn verify_laplace(
    kind: LaplaceKind,
    sigma: &IntensityMeasure<f64>,
    f: &PiecewiseConstant<f64>,
    sample_count: usize,
    rng: &RngStream,
) -> Result<VerificationReport> {
    let exact = laplace_closed_form(kind, sigma, f)?;
    let cfg = StickBreakingConfig::default();
    let lhs = monte_carlo(sample_count, &rng.substream(0), |r| {
        let m = match kind {
            LaplaceKind::Poisson => sample_poisson_pp(sigma, r)?,
            LaplaceKind::Gamma => sample_gamma_measure(sigma, &cfg, r)?,
        };
        Ok(f.pair(&m).exp())
    })?;
    let rhs = Estimate {
        mean: exact,
        std_err: 0.0,
        count: sample_count as u64,
    };
    Ok(VerificationReport::from_estimates(
        kind.as_str(),
        sigma.beta(),
        "laplace",
        lhs,
        rhs,
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Partition;

    #[test]
    fn closed_forms() {
        let p = Partition::new(vec![0.0, 0.5, 1.0]).unwrap();
        let s2 = IntensityMeasure::uniform(2.0).unwrap();
        let zero = PiecewiseConstant::constant(p.clone(), 0.0);
        assert_eq!(
            laplace_closed_form(LaplaceKind::Poisson, &s2, &zero).unwrap(),
            1.0
        );
        assert_eq!(
            laplace_closed_form(LaplaceKind::Gamma, &s2, &zero).unwrap(),
            1.0
        );

        let minus_one = PiecewiseConstant::constant(p.clone(), -1.0);
        let pois = laplace_closed_form(LaplaceKind::Poisson, &s2, &minus_one).unwrap();
        assert!((pois - (2.0 * ((-1.0f64).exp() - 1.0)).exp()).abs() < 1e-15);
        // (1 − f)^{−β} = 2^{−2}.
        let gam = laplace_closed_form(LaplaceKind::Gamma, &s2, &minus_one).unwrap();
        assert!((gam - 0.25).abs() < 1e-15);
        // f ≡ 1/2 gives 2^{β} = 4.
        let half = PiecewiseConstant::constant(p.clone(), 0.5);
        assert!((laplace_closed_form(LaplaceKind::Gamma, &s2, &half).unwrap() - 4.0).abs() < 1e-14);

        let one = PiecewiseConstant::constant(p, 1.0);
        assert!(laplace_closed_form(LaplaceKind::Gamma, &s2, &one).is_err());
        assert!(
            verify_laplace(LaplaceKind::Gamma, &s2, &one, 1000, &RngStream::new(1, 0)).is_err()
        );
    }
}
