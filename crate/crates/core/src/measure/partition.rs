use serde::{Deserialize, Serialize};

use super::discrete::{compensated_sum, DiscreteMeasure, MeasureKind};
use super::intensity::IntensityMeasure;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// An ordered partition of `[0, 1]` into the cells `[b_{i-1}, b_i)`, the
/// last one closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawPartition<F>",
    bound(deserialize = "F: Real + Deserialize<'de>")
)]
pub struct Partition<F> {
    breakpoints: Vec<F>,
}

#[derive(Deserialize)]
struct RawPartition<F> {
    breakpoints: Vec<F>,
}

impl<F: Real> TryFrom<RawPartition<F>> for Partition<F> {
    type Error = Error;

    fn try_from(raw: RawPartition<F>) -> Result<Self> {
        Self::new(raw.breakpoints)
    }
}

impl<F: Real> Partition<F> {
    pub fn new(breakpoints: Vec<F>) -> Result<Self> {
        if breakpoints.len() < 3 {
            return Err(Error::InvalidPartition(format!(
                "need at least two cells, got {} breakpoints",
                breakpoints.len()
            )));
        }
        if breakpoints[0] != F::zero() || *breakpoints.last().unwrap() != F::one() {
            return Err(Error::InvalidPartition(
                "breakpoints must run from 0 to 1".into(),
            ));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self { breakpoints })
    }

    /// `k` cells of equal length.
    pub fn uniform(k: usize) -> Result<Self> {
        let k_f = F::from_usize(k).expect("cell count fits");
        let mut b: Vec<F> = (0..=k).map(|i| F::from_usize(i).unwrap() / k_f).collect();
        if let Some(last) = b.last_mut() {
            *last = F::one();
        }
        Self::new(b)
    }

    pub fn breakpoints(&self) -> &[F] {
        &self.breakpoints
    }

    /// Number of cells `k`.
    pub fn cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Index of the cell holding `x` (clamped into `[0, 1]`).
    #[inline]
    pub fn cell_of(&self, x: F) -> usize {
        let k = self.cells();
        self.breakpoints[1..k].partition_point(|&b| b <= x)
    }

    /// `[b_{i-1}, b_i)`.
    pub fn cell_bounds(&self, i: usize) -> (F, F) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    /// Checks that every cell carries positive `σ`-mass.
    pub fn validate_for(&self, sigma: &IntensityMeasure<F>) -> Result<()> {
        for (i, m) in self.sigma_masses(sigma).into_iter().enumerate() {
            if !(m > F::zero()) {
                return Err(Error::InvalidPartition(format!(
                    "cell {i} has zero intensity mass"
                )));
            }
        }
        Ok(())
    }

    /// `ev(σ) = (σ(X_1), …, σ(X_k))`.
    pub fn sigma_masses(&self, sigma: &IntensityMeasure<F>) -> Vec<F> {
        (0..self.cells())
            .map(|i| {
                let (a, b) = self.cell_bounds(i);
                sigma.beta() * sigma.normalized_mass(a, b)
            })
            .collect()
    }

    /// `(η(X_1), …, η(X_k))` for any discrete measure.
    pub fn cell_masses(&self, eta: &DiscreteMeasure<F>) -> Vec<F> {
        let k = self.cells();
        let mut cells = vec![Vec::new(); k];
        // Atoms are sorted, so cell indices are nondecreasing.
        let mut cell = 0;
        for a in eta.atoms() {
            while cell + 1 < k && a.location >= self.breakpoints[cell + 1] {
                cell += 1;
            }
            cells[cell].push(a.mass);
        }
        cells.into_iter().map(compensated_sum).collect()
    }

    /// `ev_𝔛(η)` for a probability measure.
    pub fn ev(&self, eta: &DiscreteMeasure<F>) -> Result<SimplexVector<F>> {
        if eta.kind() != MeasureKind::ProbabilityMeasure {
            return Err(Error::InvalidMeasure(
                "evaluation on a partition requires a probability measure".into(),
            ));
        }
        SimplexVector::new(self.cell_masses(eta))
    }
}

/// A function on `[0, 1]` constant on the cells of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawPiecewise<F>",
    bound(deserialize = "F: Real + Deserialize<'de>")
)]
pub struct PiecewiseConstant<F> {
    partition: Partition<F>,
    coefficients: Vec<F>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "F: Real + Deserialize<'de>"))]
struct RawPiecewise<F> {
    partition: Partition<F>,
    coefficients: Vec<F>,
}

impl<F: Real> TryFrom<RawPiecewise<F>> for PiecewiseConstant<F> {
    type Error = Error;

    fn try_from(raw: RawPiecewise<F>) -> Result<Self> {
        Self::new(raw.partition, raw.coefficients)
    }
}

impl<F: Real> PiecewiseConstant<F> {
    pub fn new(partition: Partition<F>, coefficients: Vec<F>) -> Result<Self> {
        if coefficients.len() != partition.cells() {
            return Err(Error::LengthMismatch {
                expected: partition.cells(),
                found: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFunctional(
                "coefficients must be finite".into(),
            ));
        }
        Ok(Self {
            partition,
            coefficients,
        })
    }

    pub fn constant(partition: Partition<F>, c: F) -> Self {
        let k = partition.cells();
        Self {
            partition,
            coefficients: vec![c; k],
        }
    }

    pub fn partition(&self) -> &Partition<F> {
        &self.partition
    }

    pub fn coefficients(&self) -> &[F] {
        &self.coefficients
    }

    #[inline]
    pub fn value(&self, x: F) -> F {
        self.coefficients[self.partition.cell_of(x)]
    }

    /// `⟨g, η⟩ = Σ mass·g(location)`.
    pub fn pair(&self, eta: &DiscreteMeasure<F>) -> F {
        compensated_sum(eta.atoms().iter().map(|a| a.mass * self.value(a.location)))
    }

    /// `⟨g, σ⟩` computed cell by cell.
    pub fn pair_intensity(&self, sigma: &IntensityMeasure<F>) -> F {
        compensated_sum(
            self.partition
                .sigma_masses(sigma)
                .into_iter()
                .zip(&self.coefficients)
                .map(|(m, &c)| m * c),
        )
    }
}

/// `⟨g, η⟩` for piecewise-constant `g`.
pub fn evaluate_pairing<F: Real>(g: &PiecewiseConstant<F>, eta: &DiscreteMeasure<F>) -> F {
    g.pair(eta)
}

/// A point of the closed simplex `Δ^{k-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexVector<F>(Vec<F>);

impl<F: Real> SimplexVector<F> {
    pub fn new(components: Vec<F>) -> Result<Self> {
        if components.iter().any(|c| !(*c >= F::zero())) {
            return Err(Error::InvalidMeasure(
                "simplex components must be nonnegative".into(),
            ));
        }
        let total = compensated_sum(components.iter().copied());
        if (total - F::one()).abs() > F::MASS_TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "simplex components sum to {total}"
            )));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[F] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<F> {
        self.0
    }

    pub fn dot(&self, s: &[F]) -> F {
        compensated_sum(self.0.iter().zip(s).map(|(&y, &c)| y * c))
    }

    /// `(1 − t)y + t e_i`.
    pub fn convex_step(&self, i: usize, t: F) -> Self {
        let mut out: Vec<F> = self.0.iter().map(|&y| (F::one() - t) * y).collect();
        out[i] = out[i] + t;
        Self(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn halves() -> Partition<f64> {
        Partition::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    fn prob(atoms: &[(f64, f64)]) -> DiscreteMeasure<f64> {
        DiscreteMeasure::new(
            MeasureKind::ProbabilityMeasure,
            atoms
                .iter()
                .map(|&(x, m)| Atom::new(x, m).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0.0, 1.0]).is_err());
        assert!(Partition::new(vec![0.0, 0.5, 0.9]).is_err());
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::<f64>::uniform(3).is_ok());
    }

    #[test]
    fn cells_are_half_open() {
        let p = halves();
        assert_eq!(p.cell_of(0.0), 0);
        assert_eq!(p.cell_of(0.4999), 0);
        assert_eq!(p.cell_of(0.5), 1);
        assert_eq!(p.cell_of(1.0), 1);
    }

    #[test]
    fn pairing_examples() {
        let p = halves();
        let one = PiecewiseConstant::constant(p.clone(), 1.0);
        let eta = prob(&[(0.1, 0.4), (0.9, 0.6)]);
        assert_eq!(evaluate_pairing(&one, &eta), 1.0);

        let indicator = PiecewiseConstant::new(p.clone(), vec![1.0, 0.0]).unwrap();
        assert_eq!(
            evaluate_pairing(&indicator, &DiscreteMeasure::dirac(0.25).unwrap()),
            1.0
        );

        let g = PiecewiseConstant::new(p, vec![2.0, 3.0]).unwrap();
        assert!((evaluate_pairing(&g, &eta) - 2.6).abs() < 1e-15);
    }

    #[test]
    fn ev_examples() {
        let y = halves().ev(&DiscreteMeasure::dirac(0.7).unwrap()).unwrap();
        assert_eq!(y.components(), &[0.0, 1.0]);

        let thirds = Partition::<f64>::uniform(3).unwrap();
        let y = thirds.ev(&prob(&[(0.1, 0.5), (0.5, 0.5)])).unwrap();
        assert_eq!(y.components(), &[0.5, 0.5, 0.0]);

        let conf = DiscreteMeasure::configuration([0.2]).unwrap();
        assert!(halves().ev(&conf).is_err());
    }

    #[test]
    fn simplex_validation() {
        assert!(SimplexVector::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexVector::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexVector::new(vec![-0.1, 1.1]).is_err());
        let y = SimplexVector::new(vec![0.5, 0.5])
            .unwrap()
            .convex_step(1, 0.5);
        assert_eq!(y.components(), &[0.25, 0.75]);
    }
}
