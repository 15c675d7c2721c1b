//! Moment recurrences for the Dirichlet distribution and the
//! Dirichlet–Ferguson measure.
//!
//! All functions are generic over [`Field`]; instantiate with
//! [`Rational`](crate::Rational) for exact values or `f64` for speed.

use crate::error::{Error, Result};
use crate::measure::{IntensityMeasure, Partition, PiecewiseConstant};
use crate::scalar::Field;

/// Largest number of factors accepted by [`dirichlet_moment_multilinear`];
/// the subset recurrence touches `3^n` pairs.
pub const MAX_MULTILINEAR_FACTORS: usize = 10;

fn check_alpha<T: Field>(alpha: &[T]) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::InvalidParameter("alpha is empty".into()));
    }
    if let Some(a) = alpha.iter().find(|a| !(**a > T::zero())) {
        return Err(Error::InvalidParameter(format!(
            "alpha component {a:?} is not positive"
        )));
    }
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

fn from_usize<T: Field>(n: usize) -> T {
    T::from_usize(n).expect("small integers are representable")
}

/// `s^{∘n} · α = Σ_i s_i^n α_i`.
pub fn hadamard_power_dot<T: Field>(s: &[T], alpha: &[T], n: u32) -> Result<T> {
    check_len(alpha.len(), s.len())?;
    Ok(s.iter().zip(alpha).fold(T::zero(), |acc, (si, ai)| {
        acc + num_traits::pow(si.clone(), n as usize) * ai.clone()
    }))
}

/// The power sums `p_j = s^{∘j} · α`, `j = 1, …, n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSums<T>(Vec<T>);

impl<T: Field> PowerSums<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn from_vectors(s: &[T], alpha: &[T], n: usize) -> Result<Self> {
        check_len(alpha.len(), s.len())?;
        // Running Hadamard powers avoid recomputing s_i^j from scratch.
        let mut powers: Vec<T> = s.to_vec();
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            if j > 0 {
                for (p, si) in powers.iter_mut().zip(s) {
                    *p = p.clone() * si.clone();
                }
            }
            out.push(
                powers
                    .iter()
                    .zip(alpha)
                    .fold(T::zero(), |acc, (p, a)| acc + p.clone() * a.clone()),
            );
        }
        Ok(Self(out))
    }

    /// Number of stored power sums.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `p_j`, one-based.
    pub fn get(&self, j: usize) -> &T {
        &self.0[j - 1]
    }
}

/// Cycle index `Z_n(p_1, …, p_n)` of the symmetric group, through
/// `Z_n = (1/n) Σ_{i<n} Z_i p_{n−i}`.
pub fn cycle_index<T: Field>(n: usize, p: &PowerSums<T>) -> Result<T> {
    if p.len() < n {
        return Err(Error::InvalidParameter(format!(
            "cycle index of order {n} needs {n} power sums, got {}",
            p.len()
        )));
    }
    let mut z: Vec<T> = vec![T::one()];
    for m in 1..=n {
        let sum = (0..m).fold(T::zero(), |acc, i| {
            acc + z[i].clone() * p.get(m - i).clone()
        });
        z.push(sum / from_usize(m));
    }
    Ok(z.swap_remove(n))
}

/// Falling factorial `(r)_k = r (r − 1) ⋯ (r − k + 1)`.
fn falling<T: Field>(r: &T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, m| acc * (r.clone() - from_usize(m)))
}

/// `E[(s·y)^j]` for `y ~ Dir[α]` and every `j = 0, …, n`, by
///
/// ```text
/// M_j = Σ_{i<j} (j−1)_{j−1−i} / (β+j−1)_{j−i} · M_i · p_{j−i},   β = |α|.
/// ```
pub fn dirichlet_moments_upto<T: Field>(alpha: &[T], s: &[T], n: usize) -> Result<Vec<T>> {
    check_alpha(alpha)?;
    check_len(alpha.len(), s.len())?;
    let beta = alpha.iter().fold(T::zero(), |acc, a| acc + a.clone());
    let p = PowerSums::from_vectors(s, alpha, n)?;
    let mut m: Vec<T> = vec![T::one()];
    for j in 1..=n {
        let top = from_usize::<T>(j - 1);
        let bottom = beta.clone() + top.clone();
        let next = (0..j).fold(T::zero(), |acc, i| {
            let coef = falling(&top, j - 1 - i) / falling(&bottom, j - i);
            acc + coef * m[i].clone() * p.get(j - i).clone()
        });
        m.push(next);
    }
    Ok(m)
}

/// `E[(s·y)^n]` for `y ~ Dir[α]`, any `|α| > 0`.
pub fn dirichlet_moment<T: Field>(alpha: &[T], s: &[T], n: usize) -> Result<T> {
    Ok(dirichlet_moments_upto(alpha, s, n)?.swap_remove(n))
}

/// `E[Π_i (s^{(i)} · y)]` for `y ~ Dir[α]` with `|α| = 1`, by the subset
/// recurrence
///
/// ```text
/// M(S) = (1/|S|) Σ_{ξ ⊊ S} C(|S|, |ξ|)⁻¹ M(ξ) (∘_{j ∈ S∖ξ} s^{(j)}) · α.
/// ```
pub fn dirichlet_moment_multilinear<T: Field>(alpha: &[T], s_list: &[Vec<T>]) -> Result<T> {
    check_alpha(alpha)?;
    let total = alpha.iter().fold(T::zero(), |acc, a| acc + a.clone());
    if !total.is_unit() {
        return Err(Error::Unsupported(format!(
            "multilinear moments need |alpha| = 1, got {total:?}"
        )));
    }
    let n = s_list.len();
    if n > MAX_MULTILINEAR_FACTORS {
        return Err(Error::Unsupported(format!(
            "{n} factors exceeds the cap of {MAX_MULTILINEAR_FACTORS}"
        )));
    }
    for s in s_list {
        check_len(alpha.len(), s.len())?;
    }
    let full = (1usize << n) - 1;

    // (∘_{j ∈ mask} s^{(j)}) · α for every mask.
    let mut hadamard: Vec<Vec<T>> = Vec::with_capacity(full + 1);
    hadamard.push(vec![T::one(); alpha.len()]);
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let rest = &hadamard[mask & (mask - 1)];
        hadamard.push(
            rest.iter()
                .zip(&s_list[low])
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        );
    }
    let paired: Vec<T> = hadamard
        .iter()
        .map(|h| {
            h.iter()
                .zip(alpha)
                .fold(T::zero(), |acc, (x, a)| acc + x.clone() * a.clone())
        })
        .collect();

    let binom = binomial_table::<T>(n);
    let mut moment: Vec<T> = vec![T::zero(); full + 1];
    moment[0] = T::one();
    for mask in 1..=full {
        let size = mask.count_ones() as usize;
        let mut acc = T::zero();
        // Proper submasks of `mask`, including the empty one.
        let mut sub = (mask - 1) & mask;
        loop {
            let k = sub.count_ones() as usize;
            acc = acc + moment[sub].clone() * paired[mask ^ sub].clone() / binom[size][k].clone();
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        moment[mask] = acc / from_usize(size);
    }
    Ok(moment.swap_remove(full))
}

fn binomial_table<T: Field>(n: usize) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![T::one(); m + 1];
        for k in 1..m {
            row[k] = rows[m - 1][k - 1].clone() + rows[m - 1][k].clone();
        }
        rows.push(row);
    }
    rows
}

/// `E[Π_i (s^{(i)} · y)]` under `Dir[α]`: the univariate recurrence when all
/// vectors coincide (any `|α|`), the subset recurrence otherwise (`|α| = 1`).
pub fn partition_moment<T: Field>(alpha: &[T], vectors: &[Vec<T>]) -> Result<T> {
    match vectors.first() {
        None => Ok(T::one()),
        Some(first) if vectors.iter().all(|v| v == first) => {
            dirichlet_moment(alpha, first, vectors.len())
        }
        Some(_) => dirichlet_moment_multilinear(alpha, vectors),
    }
}

/// `ev_𝔛(σ)` in the field `T`, normalized so the cell masses sum to `β`
/// exactly.
pub fn exact_cell_masses<T: Field>(
    sigma: &IntensityMeasure<f64>,
    partition: &Partition<f64>,
) -> Result<Vec<T>> {
    let conv = |x: f64| {
        T::from_real(x).ok_or_else(|| Error::InvalidParameter(format!("{x} is not finite")))
    };
    let cdf = |x: f64| -> Result<T> {
        use crate::measure::DensitySpec;
        match sigma.density_spec() {
            DensitySpec::Uniform => conv(x),
            DensitySpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let mut acc = T::zero();
                for (w, &v) in breakpoints.windows(2).zip(values) {
                    if x <= w[0] {
                        break;
                    }
                    let right = if x < w[1] { x } else { w[1] };
                    acc = acc + (conv(right)? - conv(w[0])?) * conv(v)?;
                }
                Ok(acc)
            }
        }
    };
    let total = cdf(1.0)?;
    let beta = conv(sigma.beta())?;
    let b = partition.breakpoints();
    let mut out = Vec::with_capacity(partition.cells());
    for w in b.windows(2) {
        out.push(beta.clone() * (cdf(w[1])? - cdf(w[0])?) / total.clone());
    }
    Ok(out)
}

/// `∫ Π_i ⟨g_i, η⟩ d𝒟_σ(η)` for functions constant on the cells of one shared
/// partition.
///
/// With `α = ev_𝔛(σ)` and `s^{(i)}` the cell values of `g_i`, this is the
/// Dirichlet moment `E[Π (s^{(i)} · y)]`. Mixed products need `β = 1`.
pub fn df_moment<T: Field>(
    sigma: &IntensityMeasure<f64>,
    g_list: &[PiecewiseConstant<f64>],
) -> Result<T> {
    let Some(first) = g_list.first() else {
        return Ok(T::one());
    };
    let partition = first.partition();
    if g_list.iter().any(|g| g.partition() != partition) {
        return Err(Error::InvalidPartition(
            "functions live on different partitions".into(),
        ));
    }
    partition.validate_for(sigma)?;
    let alpha = exact_cell_masses::<T>(sigma, partition)?;
    let vectors = g_list
        .iter()
        .map(|g| {
            g.coefficients()
                .iter()
                .map(|&c| {
                    T::from_real(c)
                        .ok_or_else(|| Error::InvalidParameter("non-finite coefficient".into()))
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    partition_moment(&alpha, &vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn qs(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn hadamard_examples() {
        let a = q(2, 7);
        let b = q(3, 5);
        for n in 0..5 {
            assert_eq!(
                hadamard_power_dot(&qs(&[(1, 1), (1, 1)]), &[a.clone(), b.clone()], n).unwrap(),
                a.clone() + b.clone()
            );
        }
        assert_eq!(
            hadamard_power_dot(&qs(&[(2, 1), (0, 1)]), &qs(&[(1, 1), (1, 1)]), 3).unwrap(),
            q(8, 1)
        );
        assert_eq!(
            hadamard_power_dot(&qs(&[(1, 1), (-1, 1)]), &qs(&[(1, 2), (1, 2)]), 2).unwrap(),
            q(1, 1)
        );
        assert!(hadamard_power_dot(&qs(&[(1, 1)]), &qs(&[(1, 2), (1, 2)]), 2).is_err());
    }

    #[test]
    fn cycle_index_examples() {
        let p = PowerSums::new(qs(&[(3, 1), (5, 1), (7, 1)]));
        assert_eq!(cycle_index(0, &p).unwrap(), q(1, 1));
        assert_eq!(cycle_index(1, &p).unwrap(), q(3, 1));
        assert_eq!(cycle_index(2, &p).unwrap(), q(9 + 5, 2));
        // Z_3 = (p1³ + 3 p1 p2 + 2 p3)/6
        assert_eq!(cycle_index(3, &p).unwrap(), q(27 + 45 + 14, 6));
        assert!(cycle_index(4, &p).is_err());
    }

    #[test]
    fn cycle_index_counts_permutations() {
        // With every p_j = x, Z_n(x, …, x) = x(x+1)⋯(x+n−1)/n!; at x = 1 it is 1
        // and at x = 2 it is n + 1.
        for n in 0..8 {
            let ones = PowerSums::new(vec![q(1, 1); n]);
            assert_eq!(cycle_index(n, &ones).unwrap(), q(1, 1));
            let twos = PowerSums::new(vec![q(2, 1); n]);
            assert_eq!(cycle_index(n, &twos).unwrap(), q(n as i64 + 1, 1));
        }
    }

    #[test]
    fn dirichlet_moment_examples() {
        let any = qs(&[(2, 3), (5, 4)]);
        assert_eq!(
            dirichlet_moment(&any, &qs(&[(7, 1), (-2, 1)]), 0).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            dirichlet_moment(&qs(&[(1, 1), (1, 1)]), &qs(&[(1, 1), (0, 1)]), 2).unwrap(),
            q(1, 3)
        );
        assert_eq!(
            dirichlet_moment(&qs(&[(2, 1), (3, 1)]), &qs(&[(1, 1), (0, 1)]), 1).unwrap(),
            q(2, 5)
        );
        assert!(dirichlet_moment(&qs(&[(0, 1), (1, 1)]), &qs(&[(1, 1), (0, 1)]), 1).is_err());
        assert!(dirichlet_moment(&qs(&[(1, 1), (1, 1)]), &qs(&[(1, 1)]), 1).is_err());
    }

    #[test]
    fn beta_marginal_moments() {
        // E[Y^n] for Y ~ Beta(a, b) is Π_{m<n} (a+m)/(a+b+m).
        let (a, b) = (q(3, 2), q(5, 7));
        let m = dirichlet_moments_upto(&[a.clone(), b.clone()], &qs(&[(1, 1), (0, 1)]), 6).unwrap();
        let mut expected = q(1, 1);
        for (n, value) in m.iter().enumerate() {
            assert_eq!(*value, expected, "order {n}");
            let n = q(n as i64, 1);
            expected = expected * (a.clone() + n.clone()) / (a.clone() + b.clone() + n);
        }
    }

    #[test]
    fn multilinear_examples() {
        let alpha = qs(&[(1, 3), (1, 6), (1, 2)]);
        let s = qs(&[(2, 1), (-1, 1), (5, 3)]);
        assert_eq!(
            dirichlet_moment_multilinear(&alpha, std::slice::from_ref(&s)).unwrap(),
            hadamard_power_dot(&s, &alpha, 1).unwrap()
        );
        for n in 0..6 {
            let list = vec![s.clone(); n];
            assert_eq!(
                dirichlet_moment_multilinear(&alpha, &list).unwrap(),
                dirichlet_moment(&alpha, &s, n).unwrap()
            );
        }
        // E[y1 y2] under Dir(1/2, 1/2) = α1 α2 / (|α|(|α|+1)) = 1/8.
        let half = qs(&[(1, 2), (1, 2)]);
        let v =
            dirichlet_moment_multilinear(&half, &[qs(&[(1, 1), (0, 1)]), qs(&[(0, 1), (1, 1)])])
                .unwrap();
        assert_eq!(v, q(1, 8));
    }

    #[test]
    fn multilinear_rejects_general_beta_and_large_n() {
        let alpha = qs(&[(1, 1), (1, 1)]);
        assert!(matches!(
            dirichlet_moment_multilinear(&alpha, &[qs(&[(1, 1), (0, 1)])]),
            Err(Error::Unsupported(_))
        ));
        let unit = qs(&[(1, 2), (1, 2)]);
        assert!(dirichlet_moment_multilinear(&unit, &vec![qs(&[(1, 1), (0, 1)]); 11]).is_err());
        assert!(dirichlet_moment_multilinear(&unit, &vec![qs(&[(1, 1), (0, 1)]); 10]).is_ok());
    }

    #[test]
    fn df_moment_examples() {
        let halves = Partition::new(vec![0.0, 0.5, 1.0]).unwrap();
        let sigma = IntensityMeasure::uniform(1.0).unwrap();
        let ind = PiecewiseConstant::new(halves.clone(), vec![1.0, 0.0]).unwrap();
        assert_eq!(
            df_moment::<Rational>(&sigma, &[ind.clone(), ind.clone()]).unwrap(),
            q(3, 8)
        );

        let g = PiecewiseConstant::new(halves.clone(), vec![3.0, -1.0]).unwrap();
        // First moment is ⟨g, σ̄⟩.
        assert_eq!(
            df_moment::<Rational>(&sigma, std::slice::from_ref(&g)).unwrap(),
            q(1, 1)
        );
        let s2 = sigma.with_beta(2.0).unwrap();
        assert_eq!(
            df_moment::<Rational>(&s2, std::slice::from_ref(&g)).unwrap(),
            q(1, 1)
        );

        let c = PiecewiseConstant::constant(halves.clone(), 1.5);
        assert_eq!(df_moment::<Rational>(&s2, &vec![c; 3]).unwrap(), q(27, 8));

        let other = PiecewiseConstant::constant(Partition::uniform(3).unwrap(), 1.0);
        assert!(df_moment::<Rational>(&sigma, &[ind.clone(), other]).is_err());
        // Mixed products with β ≠ 1 are outside the subset recurrence.
        assert!(df_moment::<Rational>(&s2, &[ind, g]).is_err());
    }

    #[test]
    fn exact_cell_masses_sum_to_beta() {
        let sigma =
            IntensityMeasure::piecewise_normalized(0.5, vec![0.0, 0.3, 1.0], vec![1.0, 3.0])
                .unwrap();
        let part = Partition::new(vec![0.0, 0.2, 0.7, 1.0]).unwrap();
        let alpha = exact_cell_masses::<Rational>(&sigma, &part).unwrap();
        let total = alpha.iter().fold(q(0, 1), |a, b| a + b.clone());
        assert_eq!(total, q(1, 2));
    }
}
