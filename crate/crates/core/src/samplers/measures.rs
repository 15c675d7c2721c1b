//! Samplers for the random measures themselves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::expint::exp_integral_e1;
use super::variates::{sample_beta_one, sample_exp1, sample_poisson_count, standard_gamma};
use crate::error::{Error, Result};
use crate::measure::{compensated_sum, Atom, DiscreteMeasure, IntensityMeasure, MeasureKind};
use crate::scalar::Real;

/// Truncation of the stick-breaking series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StickBreakingConfig<F> {
    /// Maximum number of sticks before giving up.
    pub max_atoms: usize,
    /// Stop once the unbroken stick is shorter than this.
    pub remainder_tolerance: F,
}

impl<F: Real> Default for StickBreakingConfig<F> {
    fn default() -> Self {
        Self {
            max_atoms: 10_000,
            remainder_tolerance: F::lit(1e-12),
        }
    }
}

impl<F: Real> StickBreakingConfig<F> {
    fn validate(&self) -> Result<()> {
        if !(self.remainder_tolerance > F::zero() && self.remainder_tolerance <= F::lit(1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "remainder tolerance {} must lie in (0, 1e-12]",
                self.remainder_tolerance
            )));
        }
        if self.max_atoms == 0 {
            return Err(Error::InvalidParameter("max_atoms must be positive".into()));
        }
        Ok(())
    }
}

/// `γ ~ 𝒫_σ`: `N ~ Poisson(β)` unit atoms at i.i.d. `σ̄` locations.
pub fn sample_poisson_pp<F: Real, R: Rng + ?Sized>(
    sigma: &IntensityMeasure<F>,
    rng: &mut R,
) -> Result<DiscreteMeasure<F>> {
    let n = sample_poisson_count(sigma.beta(), rng)? as usize;
    let mut xs: Vec<F> = (0..n).map(|_| sigma.sample_location(rng)).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("locations are finite"));
    // Ties have probability zero for a diffuse σ but finite precision allows
    // them; redraw until the configuration is simple.
    while let Some(i) = xs.windows(2).position(|w| w[0] == w[1]) {
        xs[i] = sigma.sample_location(rng);
        xs.sort_by(|a, b| a.partial_cmp(b).expect("locations are finite"));
    }
    let atoms = xs
        .into_iter()
        .map(|x| Atom {
            location: x,
            mass: F::one(),
        })
        .collect();
    Ok(DiscreteMeasure::from_sorted_unchecked(
        MeasureKind::Configuration,
        atoms,
    ))
}

/// `η ~ 𝒟_σ` by stick-breaking with `Beta[1, β]` sticks.
///
/// Atom `j` has weight `t_j Π_{i<j}(1 − t_i)` at an i.i.d. `σ̄` location.
/// Once the unbroken stick drops below the tolerance, what is left goes to
/// one more `σ̄` atom so the result has mass one.
pub fn sample_dirichlet_ferguson<F: Real, R: Rng + ?Sized>(
    sigma: &IntensityMeasure<F>,
    cfg: &StickBreakingConfig<F>,
    rng: &mut R,
) -> Result<DiscreteMeasure<F>> {
    cfg.validate()?;
    let beta = sigma.beta();
    let mut atoms: Vec<Atom<F>> = Vec::new();
    let mut remainder = F::one();
    let mut sticks = 0usize;
    while remainder >= cfg.remainder_tolerance {
        if sticks == cfg.max_atoms {
            return Err(Error::Truncation {
                atoms: sticks,
                remainder: remainder.as_f64(),
                tolerance: cfg.remainder_tolerance.as_f64(),
            });
        }
        sticks += 1;
        let t = sample_beta_one(beta, rng);
        let w = t * remainder;
        remainder = remainder * (F::one() - t);
        let x = sigma.sample_location(rng);
        if w > F::zero() {
            atoms.push(Atom {
                location: x,
                mass: w,
            });
        }
    }
    let leftover = F::one() - compensated_sum(atoms.iter().map(|a| a.mass));
    let x = sigma.sample_location(rng);
    if leftover > F::zero() {
        atoms.push(Atom {
            location: x,
            mass: leftover,
        });
    }
    DiscreteMeasure::from_atoms_merging(MeasureKind::ProbabilityMeasure, atoms)
}

/// `ν ~ 𝒢_σ` as `r·η` with independent `η ~ 𝒟_σ` and `r ~ Gam[β, 1]`.
pub fn sample_gamma_measure<F: Real, R: Rng + ?Sized>(
    sigma: &IntensityMeasure<F>,
    cfg: &StickBreakingConfig<F>,
    rng: &mut R,
) -> Result<DiscreteMeasure<F>> {
    let eta = sample_dirichlet_ferguson(sigma, cfg, rng)?;
    let r = standard_gamma(sigma.beta(), rng);
    if r > F::zero() {
        eta.scaled(r)
    } else {
        // Gam[β, 1] underflowed (tiny β): the measure is numerically zero.
        DiscreteMeasure::zero(MeasureKind::FiniteMeasure)
    }
}

/// Gamma measure from the marked Poisson process with intensity
/// `σ ⊗ s⁻¹e⁻ˢ ds` restricted to marks `s > cutoff`.
///
/// Masses below the cutoff are dropped, so `E[ν(X)] = β e^{-cutoff}` rather
/// than `β`. Meant for cross-checking [`sample_gamma_measure`].
pub fn sample_gamma_measure_levy<F: Real, R: Rng + ?Sized>(
    sigma: &IntensityMeasure<F>,
    levy_cutoff: F,
    rng: &mut R,
) -> Result<DiscreteMeasure<F>> {
    let marks = LevyMarks::new(levy_cutoff.as_f64())?;
    let beta = sigma.beta().as_f64();
    let n = sample_poisson_count(F::lit(beta * marks.total), rng)? as usize;
    let atoms = (0..n)
        .map(|_| {
            let s = marks.sample(rng);
            let x = sigma.sample_location(rng);
            Atom {
                location: x,
                mass: F::lit(s),
            }
        })
        .filter(|a| a.mass > F::zero() && a.mass.is_finite())
        .collect();
    DiscreteMeasure::from_atoms_merging(MeasureKind::FiniteMeasure, atoms)
}

/// Marks from the normalized density `s⁻¹e⁻ˢ / E₁(ε)` on `(ε, ∞)`.
struct LevyMarks {
    cutoff: f64,
    /// `E₁(ε)`
    total: f64,
    /// Probability of the piece `(ε, 1]`.
    lower_weight: f64,
}

impl LevyMarks {
    fn new(cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lévy cutoff {cutoff} must be positive"
            )));
        }
        let total = exp_integral_e1(cutoff);
        let lower = if cutoff < 1.0 {
            total - exp_integral_e1(1.0)
        } else {
            0.0
        };
        Ok(Self {
            cutoff,
            total,
            lower_weight: lower / total,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < self.lower_weight {
            // Log-uniform proposal s⁻¹ on (ε, 1], accepted with e^{-s}.
            let log_eps = self.cutoff.ln();
            loop {
                let s = (log_eps * (1.0 - rng.random::<f64>())).exp();
                if rng.random::<f64>() < (-s).exp() {
                    return s;
                }
            }
        } else {
            // m + Exp(1) proposal on (m, ∞), accepted with m/s.
            let m = self.cutoff.max(1.0);
            loop {
                let s = m + sample_exp1::<f64, R>(rng);
                if rng.random::<f64>() * s < m {
                    return s;
                }
            }
        }
    }
}
