//! Direct numerical integration against the Dirichlet density on the 2- and
//! 3-simplex, independent of the moment recurrences.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted grid resolution.
pub const MIN_RESOLUTION: usize = 256;
/// Largest acceptable difference between the full and half-resolution rules.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

/// Gauss–Jacobi rule on `[0, 1]` for the probability weight
/// `u^a (1 − u)^b / B(a + 1, b + 1)`.
#[derive(Clone, Debug)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussJacobi {
    /// `n`-point rule by Golub–Welsch; needs `a, b > −1`.
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "rule needs at least one node".into(),
            ));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents ({a}, {b}) must exceed -1"
            )));
        }
        // On [−1, 1] the weight (1 − x)^p (1 + x)^q with u = (1 + x)/2.
        let (p, q) = (b, a);
        let s = p + q;
        let diag = |k: usize| -> f64 {
            if k == 0 {
                (q - p) / (s + 2.0)
            } else {
                let k = k as f64;
                (q * q - p * p) / ((2.0 * k + s) * (2.0 * k + s + 2.0))
            }
        };
        let off = |k: usize| -> f64 {
            let kf = k as f64;
            let b2 = if k == 1 {
                4.0 * (1.0 + p) * (1.0 + q) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                let m = 2.0 * kf + s;
                4.0 * kf * (kf + p) * (kf + q) * (kf + s) / (m * m * (m + 1.0) * (m - 1.0))
            };
            b2.sqrt()
        };
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            jacobi[(k, k)] = diag(k);
            if k + 1 < n {
                let e = off(k + 1);
                jacobi[(k, k + 1)] = e;
                jacobi[(k + 1, k)] = e;
            }
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                (
                    (1.0 + eig.eigenvalues[j]) / 2.0,
                    eig.eigenvectors[(0, j)].powi(2),
                )
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_j w_j f(u_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

/// A polynomial in the simplex coordinates `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplexPolynomial {
    /// `Σ c · Π_i y_i^{e_i}` as `(c, e)` pairs.
    Monomials(Vec<(f64, Vec<u32>)>),
    /// `Π_j (s^{(j)} · y)`.
    LinearForms(Vec<Vec<f64>>),
}

impl SimplexPolynomial {
    pub fn constant(c: f64) -> Self {
        Self::Monomials(vec![(c, Vec::new())])
    }

    /// `(s · y)^n`.
    pub fn linear_power(s: Vec<f64>, n: usize) -> Self {
        Self::LinearForms(vec![s; n])
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        match self {
            Self::Monomials(terms) => terms
                .iter()
                .map(|(c, e)| {
                    c * e
                        .iter()
                        .zip(y)
                        .map(|(&k, &yi)| yi.powi(k as i32))
                        .product::<f64>()
                })
                .sum(),
            Self::LinearForms(forms) => forms
                .iter()
                .map(|s| s.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
                .product(),
        }
    }

    fn check_dimension(&self, k: usize) -> Result<()> {
        let bad = match self {
            Self::Monomials(terms) => terms
                .iter()
                .find(|(_, e)| e.len() > k)
                .map(|(_, e)| e.len()),
            Self::LinearForms(forms) => forms.iter().find(|s| s.len() != k).map(Vec::len),
        };
        match bad {
            Some(found) => Err(Error::LengthMismatch { expected: k, found }),
            None => Ok(()),
        }
    }
}

/// Whether the oracle covers `Dir[α]`: `k ∈ {2, 3}` and every `α_i ≥ 1/2`.
pub fn oracle_applies(alpha: &[f64]) -> bool {
    (2..=3).contains(&alpha.len()) && alpha.iter().all(|a| *a >= 0.5 && a.is_finite())
}

/// Tensor Gauss–Jacobi rule for `Dir[α]`, `k ∈ {2, 3}`.
///
/// `k = 3` uses `y = (u, (1 − u)v, (1 − u)(1 − v))`, under which the
/// Dirichlet density factors into a Jacobi weight in `u` and one in `v`.
#[derive(Clone, Debug)]
pub struct SimplexQuadrature {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SimplexQuadrature {
    pub fn new(alpha: &[f64], resolution: usize) -> Result<Self> {
        match alpha.len() {
            2 | 3 => {}
            k => {
                return Err(Error::Unsupported(format!(
                    "simplex quadrature handles k = 2 or 3, got {k}"
                )))
            }
        }
        if let Some(a) = alpha.iter().find(|a| !(**a >= 0.5 && a.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "alpha component {a} is below 1/2"
            )));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} is below {MIN_RESOLUTION}"
            )));
        }
        Self::build(alpha, resolution)
    }

    fn build(alpha: &[f64], n: usize) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if alpha.len() == 2 {
            let rule = GaussJacobi::new(n, alpha[0] - 1.0, alpha[1] - 1.0)?;
            for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
                points.push(vec![u, 1.0 - u]);
                weights.push(w);
            }
        } else {
            let outer = GaussJacobi::new(n, alpha[0] - 1.0, alpha[1] + alpha[2] - 1.0)?;
            let inner = GaussJacobi::new(n, alpha[1] - 1.0, alpha[2] - 1.0)?;
            for (&u, &wu) in outer.nodes().iter().zip(outer.weights()) {
                for (&v, &wv) in inner.nodes().iter().zip(inner.weights()) {
                    points.push(vec![u, (1.0 - u) * v, (1.0 - u) * (1.0 - v)]);
                    weights.push(wu * wv);
                }
            }
        }
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(y, &w)| w * f(y))
            .sum()
    }
}

/// `E_{Dir[α]}[integrand(y)]` by tensor Gauss–Jacobi quadrature.
///
/// The estimate is compared against the rule at half the resolution and
/// rejected if the two differ by more than [`CONVERGENCE_TOLERANCE`].
pub fn simplex_quadrature_oracle(
    alpha: &[f64],
    integrand: &SimplexPolynomial,
    resolution: usize,
) -> Result<f64> {
    let fine = SimplexQuadrature::new(alpha, resolution)?;
    integrand.check_dimension(alpha.len())?;
    let coarse = SimplexQuadrature::build(alpha, resolution / 2)?;
    let value = fine.integrate(|y| integrand.eval(y));
    let check = coarse.integrate(|y| integrand.eval(y));
    let error = (value - check).abs();
    if error > CONVERGENCE_TOLERANCE || !value.is_finite() {
        return Err(Error::Quadrature(error));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::ln_beta;

    #[test]
    fn gauss_jacobi_matches_beta_moments() {
        // ∫ u^m u^a (1−u)^b du / B(a+1, b+1) = B(a+m+1, b+1)/B(a+1, b+1).
        for &(a, b) in &[(0.0, 0.0), (-0.5, -0.5), (1.0, 2.0), (2.5, -0.3)] {
            let rule = GaussJacobi::new(20, a, b).unwrap();
            for m in 0..10 {
                let exact =
                    (ln_beta(a + m as f64 + 1.0, b + 1.0) - ln_beta(a + 1.0, b + 1.0)).exp();
                let got = rule.integrate(|u| u.powi(m));
                assert!(
                    (got - exact).abs() < 1e-13,
                    "a={a} b={b} m={m}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let one = SimplexPolynomial::constant(1.0);
        for alpha in [vec![0.5, 0.5], vec![2.0, 3.0], vec![0.5, 1.0, 4.0]] {
            assert!((simplex_quadrature_oracle(&alpha, &one, 256).unwrap() - 1.0).abs() < 1e-8);
        }
        let y1 = SimplexPolynomial::Monomials(vec![(1.0, vec![1])]);
        assert!((simplex_quadrature_oracle(&[1.0, 1.0], &y1, 256).unwrap() - 0.5).abs() < 1e-8);

        // B(4,3)/B(2,3) = Γ(4)Γ(5)/(Γ(7)Γ(2)) = 6·24/720 = 1/5.
        let y1sq = SimplexPolynomial::Monomials(vec![(1.0, vec![2])]);
        let ratio = (ln_beta(4.0, 3.0) - ln_beta(2.0, 3.0)).exp();
        assert!((ratio - 0.2).abs() < 1e-14);
        assert!((simplex_quadrature_oracle(&[2.0, 3.0], &y1sq, 256).unwrap() - ratio).abs() < 1e-8);
    }

    #[test]
    fn three_simplex_cross_moment() {
        // E[y1 y2] under Dir(1,1,1) = 1/12.
        let f = SimplexPolynomial::Monomials(vec![(1.0, vec![1, 1, 0])]);
        let v = simplex_quadrature_oracle(&[1.0, 1.0, 1.0], &f, 256).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-10);
    }

    #[test]
    fn oracle_rejections() {
        let one = SimplexPolynomial::constant(1.0);
        assert!(matches!(
            simplex_quadrature_oracle(&[1.0; 4], &one, 256),
            Err(Error::Unsupported(_))
        ));
        assert!(simplex_quadrature_oracle(&[0.4, 1.0], &one, 256).is_err());
        assert!(simplex_quadrature_oracle(&[1.0, 1.0], &one, 255).is_err());
        let wrong = SimplexPolynomial::LinearForms(vec![vec![1.0, 0.0, 0.0]]);
        assert!(simplex_quadrature_oracle(&[1.0, 1.0], &wrong, 256).is_err());
        // Degree far beyond what the half-resolution rule integrates exactly.
        let steep = SimplexPolynomial::Monomials(vec![(1.0, vec![20_000])]);
        assert!(matches!(
            simplex_quadrature_oracle(&[1.0, 1.0], &steep, 256),
            Err(Error::Quadrature(_))
        ));
    }
}
