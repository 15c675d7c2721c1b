//! Exact common values of both sides, where the moment recurrences reach.

use super::case::Identity;
use crate::measure::{IntensityMeasure, TestFunctional};
use crate::moments::{exact_cell_masses, partition_moment, poisson_moment};
use crate::scalar::Field;
use crate::Rational;

/// The exact value of either side of `identity`, or `None` when the
/// functional is outside what the recurrences handle: mass-dependent terms,
/// or products of distinct pairings with `β ≠ 1`.
///
/// With `y = ev_𝔛(η)` a monomial `Π⟨g_i,·⟩^{a_i} Π g_i(x)^{b_i}` integrates
/// over the atoms to `Π (s_i·y)^{a_i} (h·y)` with `h = ∘_i s_i^{∘b_i}`; for a
/// gamma measure `ν = rη` this picks up `E[r^{1+|a|}]`, and for a Poisson
/// process `y` becomes the vector of independent cell counts.
pub fn exact_value(
    identity: Identity,
    sigma: &IntensityMeasure<f64>,
    functional: &TestFunctional<f64>,
) -> Option<Rational> {
    if functional.arity() != identity.arity() {
        return None;
    }
    let alpha = exact_cell_masses::<Rational>(sigma, functional.partition()).ok()?;
    let beta = Rational::from_real(sigma.beta())?;
    let s: Vec<Vec<Rational>> = functional
        .functions()
        .iter()
        .map(|v| {
            v.iter()
                .map(|&c| Rational::from_real(c))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<_>>()?;
    let k = alpha.len();
    let mut total = Rational::from_integer(0.into());
    for (key, coef) in functional.monomials() {
        if key.mass > 0 {
            return None;
        }
        let mut forms: Vec<Vec<Rational>> = Vec::new();
        for (i, &a) in key.pairing.iter().enumerate() {
            forms.extend(std::iter::repeat_n(s[i].clone(), a as usize));
        }
        let degree = forms.len();
        let h: Option<Vec<Rational>> = key.point.iter().any(|&b| b > 0).then(|| {
            (0..k)
                .map(|c| {
                    key.point
                        .iter()
                        .enumerate()
                        .fold(Rational::from_integer(1.into()), |acc, (i, &b)| {
                            acc * num_traits::pow(s[i][c].clone(), b as usize)
                        })
                })
                .collect()
        });
        let value = match identity {
            Identity::DfMeckeG | Identity::FiniteDimG => partition_moment(&alpha, &forms).ok()?,
            Identity::DfMeckeF
            | Identity::DfMeckeR
            | Identity::FiniteDimF
            | Identity::GammaMecke => {
                // Without point factors h·y = |y| = 1.
                forms.extend(h);
                let m = partition_moment(&alpha, &forms).ok()?;
                if identity == Identity::GammaMecke {
                    m * rising(&beta, degree + 1)
                } else {
                    m
                }
            }
            Identity::PoissonMecke => {
                forms.push(h.unwrap_or_else(|| vec![Rational::from_integer(1.into()); k]));
                poisson_moment(&alpha, &forms).ok()?
            }
        };
        total += Rational::from_real(coef)? * value;
    }
    Some(total)
}

/// `β (β + 1) ⋯ (β + n − 1) = E[r^n]` for `r ~ Gam[β, 1]`.
fn rising(beta: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::from_integer(1.into()), |acc, m| {
        acc * (beta.clone() + Rational::from_integer((m as i64).into()))
    })
}
