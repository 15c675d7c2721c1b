//! Scalar and vector variates: gamma, beta, Dirichlet, exponential, Poisson.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::measure::SimplexVector;
use crate::scalar::Real;

fn check_positive<F: Real>(name: &str, v: F) -> Result<()> {
    if v > F::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {v} must be positive and finite"
        )))
    }
}

/// Uniform on `(0, 1]`, safe to take logarithms of.
#[inline]
pub(crate) fn open_unit<F: Real, R: Rng + ?Sized>(rng: &mut R) -> F {
    F::one() - F::unit(rng)
}

/// `Gam[shape, scale]`, density `r^{k-1} e^{-r/θ} / (θ^k Γ(k))`.
pub fn sample_gamma_rv<F: Real, R: Rng + ?Sized>(shape: F, scale: F, rng: &mut R) -> Result<F> {
    check_positive("shape", shape)?;
    check_positive("scale", scale)?;
    Ok(standard_gamma(shape, rng) * scale)
}

/// Marsaglia–Tsang squeeze for `shape ≥ 1`, boosted by `U^{1/shape}` below.
pub(crate) fn standard_gamma<F: Real, R: Rng + ?Sized>(shape: F, rng: &mut R) -> F {
    if shape < F::one() {
        let boost = open_unit::<F, R>(rng).powf(shape.recip());
        return standard_gamma(shape + F::one(), rng) * boost;
    }
    let third = F::lit(1.0 / 3.0);
    let d = shape - third;
    let c = (F::lit(9.0) * d).sqrt().recip();
    loop {
        let x = F::standard_normal(rng);
        let v = F::one() + c * x;
        if v <= F::zero() {
            continue;
        }
        let v = v * v * v;
        let u = F::unit(rng);
        let x2 = x * x;
        if u < F::one() - F::lit(0.0331) * x2 * x2 {
            return d * v;
        }
        if u.ln() < F::lit(0.5) * x2 + d * (F::one() - v + v.ln()) {
            return d * v;
        }
    }
}

/// `ln G` for `G ~ Gam[shape, 1]`, accurate even when `G` underflows.
pub(crate) fn log_standard_gamma<F: Real, R: Rng + ?Sized>(shape: F, rng: &mut R) -> F {
    if shape < F::one() {
        let log_boost = open_unit::<F, R>(rng).ln() / shape;
        return standard_gamma(shape + F::one(), rng).ln() + log_boost;
    }
    standard_gamma(shape, rng).ln()
}

/// `Exp(1) = Gam[1, 1]` by inversion.
pub fn sample_exp1<F: Real, R: Rng + ?Sized>(rng: &mut R) -> F {
    -open_unit::<F, R>(rng).ln()
}

/// `Beta[a, b]` as `G_a / (G_a + G_b)`, formed in log space so tiny shapes
/// do not produce `0/0`.
pub fn sample_beta_rv<F: Real, R: Rng + ?Sized>(a: F, b: F, rng: &mut R) -> Result<F> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let la = log_standard_gamma(a, rng);
    let lb = log_standard_gamma(b, rng);
    Ok((F::one() + (lb - la).exp()).recip())
}

/// `Beta[1, b]` by inversion: `t = 1 − V^{1/b}` with `V` uniform on `(0, 1]`.
///
/// With `b = 1` this is exactly `1 − V`, the same bits a uniform draw of `t`
/// from the same stream produces.
#[inline]
pub fn sample_beta_one<F: Real, R: Rng + ?Sized>(b: F, rng: &mut R) -> F {
    beta_one_from_uniform(b, open_unit(rng))
}

/// Shared by [`sample_beta_one`] and the importance-sampling path.
#[inline]
pub(crate) fn beta_one_from_uniform<F: Real>(b: F, v: F) -> F {
    F::one() - v.powf(b.recip())
}

/// `Dir[α]` as normalized independent `Gam[α_i, 1]` variates.
pub fn sample_dirichlet<F: Real, R: Rng + ?Sized>(
    alpha: &[F],
    rng: &mut R,
) -> Result<SimplexVector<F>> {
    if alpha.len() < 2 {
        return Err(Error::InvalidParameter(
            "Dirichlet needs at least two components".into(),
        ));
    }
    for &a in alpha {
        check_positive("alpha", a)?;
    }
    let logs: Vec<F> = alpha.iter().map(|&a| log_standard_gamma(a, rng)).collect();
    let max = logs.iter().copied().fold(F::neg_infinity(), F::max);
    let weights: Vec<F> = logs.iter().map(|&l| (l - max).exp()).collect();
    let total = weights.iter().copied().fold(F::zero(), |a, b| a + b);
    SimplexVector::new(weights.into_iter().map(|w| w / total).collect())
}

/// `Poisson(mean)` count.
pub fn sample_poisson_count<F: Real, R: Rng + ?Sized>(mean: F, rng: &mut R) -> Result<u64> {
    let mean = mean.as_f64();
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}
