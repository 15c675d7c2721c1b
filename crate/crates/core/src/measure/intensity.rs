use rand::Rng;
use serde::{Deserialize, Serialize};

use super::discrete::compensated_sum;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the normalized intensity `σ̄ = σ/β` is described on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySpec<F> {
    /// Lebesgue measure.
    Uniform,
    /// Density `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
    PiecewiseConstant { breakpoints: Vec<F>, values: Vec<F> },
}

/// A finite diffuse intensity `σ` on `[0, 1]`: total mass `β` times a
/// probability density.
///
/// JSON form:
///
/// ```json
/// {"beta": 2.0, "density": "uniform"}
/// {"beta": 1.0, "density": {"piecewise_constant": {"breakpoints": [0, 0.5, 1], "values": [1.5, 0.5]}}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntensitySpec<F>", into = "IntensitySpec<F>")]
#[serde(bound(
    serialize = "F: Real + Serialize",
    deserialize = "F: Real + Deserialize<'de>"
))]
pub struct IntensityMeasure<F> {
    beta: F,
    density: DensitySpec<F>,
    /// `σ̄([0, b_i))` at each breakpoint of a piecewise density.
    cumulative: Vec<F>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntensitySpec<F> {
    pub beta: F,
    pub density: DensitySpec<F>,
}

impl<F: Real> TryFrom<IntensitySpec<F>> for IntensityMeasure<F> {
    type Error = Error;

    fn try_from(spec: IntensitySpec<F>) -> Result<Self> {
        Self::new(spec.beta, spec.density)
    }
}

impl<F: Real> From<IntensityMeasure<F>> for IntensitySpec<F> {
    fn from(m: IntensityMeasure<F>) -> Self {
        IntensitySpec {
            beta: m.beta,
            density: m.density,
        }
    }
}

impl<F: Real> IntensityMeasure<F> {
    pub fn new(beta: F, density: DensitySpec<F>) -> Result<Self> {
        if !(beta > F::zero() && beta.is_finite()) {
            return Err(Error::InvalidIntensity(format!(
                "beta = {beta} must be positive"
            )));
        }
        let cumulative = match &density {
            DensitySpec::Uniform => Vec::new(),
            DensitySpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                check_table(breakpoints, values)?;
                let mut acc = vec![F::zero()];
                let mut pieces = Vec::with_capacity(values.len());
                for (w, &v) in breakpoints.windows(2).zip(values) {
                    pieces.push((w[1] - w[0]) * v);
                    acc.push(compensated_sum(pieces.iter().copied()));
                }
                let total = *acc.last().unwrap();
                if (total - F::one()).abs() > F::DENSITY_TOLERANCE {
                    return Err(Error::InvalidIntensity(format!(
                        "density integrates to {total}, not 1"
                    )));
                }
                acc
            }
        };
        Ok(Self {
            beta,
            density,
            cumulative,
        })
    }

    /// `β` times Lebesgue measure on `[0, 1]`.
    pub fn uniform(beta: F) -> Result<Self> {
        Self::new(beta, DensitySpec::Uniform)
    }

    /// A piecewise-constant density, rescaled to integrate to one.
    pub fn piecewise_normalized(beta: F, breakpoints: Vec<F>, values: Vec<F>) -> Result<Self> {
        check_table(&breakpoints, &values)?;
        let total = compensated_sum(
            breakpoints
                .windows(2)
                .zip(&values)
                .map(|(w, &v)| (w[1] - w[0]) * v),
        );
        if !(total > F::zero()) {
            return Err(Error::InvalidIntensity("density has zero integral".into()));
        }
        let values = values.into_iter().map(|v| v / total).collect();
        Self::new(
            beta,
            DensitySpec::PiecewiseConstant {
                breakpoints,
                values,
            },
        )
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn density_spec(&self) -> &DensitySpec<F> {
        &self.density
    }

    /// The same density with total mass `beta`.
    pub fn with_beta(&self, beta: F) -> Result<Self> {
        Self::new(beta, self.density.clone())
    }

    /// Density of `σ̄` at `x`.
    pub fn density(&self, x: F) -> F {
        if !(x >= F::zero() && x <= F::one()) {
            return F::zero();
        }
        match &self.density {
            DensitySpec::Uniform => F::one(),
            DensitySpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let k = values.len();
                values[breakpoints[1..k].partition_point(|&b| b <= x)]
            }
        }
    }

    /// `σ̄([0, x))`.
    pub fn cdf(&self, x: F) -> F {
        let x = x.max(F::zero()).min(F::one());
        match &self.density {
            DensitySpec::Uniform => x,
            DensitySpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let k = values.len();
                let i = breakpoints[1..k].partition_point(|&b| b <= x);
                self.cumulative[i] + (x - breakpoints[i]) * values[i]
            }
        }
    }

    /// `σ̄([a, b))`.
    pub fn normalized_mass(&self, a: F, b: F) -> F {
        (self.cdf(b) - self.cdf(a)).max(F::zero())
    }

    /// Quantile function of `σ̄`, mapping `[0, 1)` into `[0, 1]`.
    pub fn cdf_inverse(&self, u: F) -> F {
        match &self.density {
            DensitySpec::Uniform => u,
            DensitySpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let k = values.len();
                // First cell whose right cumulative edge exceeds u; zero-density
                // cells have equal edges and are skipped.
                let i = self.cumulative[1..=k]
                    .partition_point(|&c| c <= u)
                    .min(k - 1);
                let mut i = i;
                while values[i] == F::zero() && i > 0 {
                    i -= 1;
                }
                let x = breakpoints[i] + (u - self.cumulative[i]) / values[i];
                x.max(breakpoints[i]).min(breakpoints[i + 1])
            }
        }
    }

    /// One location drawn from `σ̄`.
    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        self.cdf_inverse(F::unit(rng))
    }
}

fn check_table<F: Real>(breakpoints: &[F], values: &[F]) -> Result<()> {
    if breakpoints.len() != values.len() + 1 || values.is_empty() {
        return Err(Error::InvalidIntensity(format!(
            "{} breakpoints for {} density values",
            breakpoints.len(),
            values.len()
        )));
    }
    if breakpoints[0] != F::zero() || *breakpoints.last().unwrap() != F::one() {
        return Err(Error::InvalidIntensity(
            "density breakpoints must run from 0 to 1".into(),
        ));
    }
    if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidIntensity(
            "density breakpoints must increase".into(),
        ));
    }
    if values.iter().any(|v| !(*v >= F::zero() && v.is_finite())) {
        return Err(Error::InvalidIntensity(
            "density values must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}
