//! Mixed moments of independent Poisson cell counts.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Stirling numbers of the second kind `S(k, j)` for `k ≤ n`.
fn stirling2<T: Field>(n: usize) -> Vec<Vec<T>> {
    let mut s: Vec<Vec<T>> = vec![vec![T::one()]];
    for k in 1..=n {
        let mut row = vec![T::zero(); k + 1];
        for j in 1..=k {
            let prev = &s[k - 1];
            let left = prev.get(j - 1).cloned().unwrap_or_else(T::zero);
            let same = prev.get(j).cloned().unwrap_or_else(T::zero);
            row[j] = left + T::from_usize(j).expect("small integer") * same;
        }
        s.push(row);
    }
    s
}

/// `E[N^k]` for `N ~ Poisson(λ)`: the Touchard polynomial `Σ_j S(k, j) λ^j`.
pub fn poisson_raw_moment<T: Field>(lambda: &T, k: usize) -> T {
    let s = stirling2::<T>(k);
    s[k].iter().enumerate().fold(T::zero(), |acc, (j, c)| {
        acc + c.clone() * num_traits::pow(lambda.clone(), j)
    })
}

/// `E[Π_j (v^{(j)} · N)]` for independent `N_c ~ Poisson(α_c)`.
pub fn poisson_moment<T: Field>(alpha: &[T], forms: &[Vec<T>]) -> Result<T> {
    if let Some(a) = alpha.iter().find(|a| **a < T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Poisson mean {a:?} is negative"
        )));
    }
    let k = alpha.len();
    let mut poly: BTreeMap<Vec<usize>, T> = BTreeMap::from([(vec![0; k], T::one())]);
    for v in forms {
        if v.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                found: v.len(),
            });
        }
        let mut next: BTreeMap<Vec<usize>, T> = BTreeMap::new();
        for (exps, c) in &poly {
            for (cell, vc) in v.iter().enumerate() {
                if vc.is_zero() {
                    continue;
                }
                let mut e = exps.clone();
                e[cell] += 1;
                let slot = next.entry(e).or_insert_with(T::zero);
                *slot = slot.clone() + c.clone() * vc.clone();
            }
        }
        poly = next;
    }
    Ok(poly.iter().fold(T::zero(), |acc, (exps, c)| {
        let m = exps
            .iter()
            .zip(alpha)
            .fold(T::one(), |p, (&e, a)| p * poisson_raw_moment(a, e));
        acc + c.clone() * m
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn touchard_values() {
        let l = q(3, 2);
        assert_eq!(poisson_raw_moment(&l, 0), q(1, 1));
        assert_eq!(poisson_raw_moment(&l, 1), l.clone());
        assert_eq!(poisson_raw_moment(&l, 2), l.clone() * l.clone() + l.clone());
        // λ³ + 3λ² + λ
        assert_eq!(
            poisson_raw_moment(&l, 3),
            l.clone() * l.clone() * l.clone() + q(3, 1) * l.clone() * l.clone() + l.clone()
        );
        assert_eq!(poisson_raw_moment(&q(1, 1), 4), q(15, 1));
    }

    #[test]
    fn mixed_moments() {
        let alpha = vec![q(1, 2), q(3, 2)];
        let ones = vec![q(1, 1), q(1, 1)];
        // |N| ~ Poisson(2): E|N|² = 6.
        assert_eq!(
            poisson_moment(&alpha, &[ones.clone(), ones.clone()]).unwrap(),
            q(6, 1)
        );
        // Independent cells: E[N_0 N_1] = α_0 α_1.
        let e0 = vec![q(1, 1), q(0, 1)];
        let e1 = vec![q(0, 1), q(1, 1)];
        assert_eq!(poisson_moment(&alpha, &[e0, e1]).unwrap(), q(3, 4));
        assert_eq!(poisson_moment::<Rational>(&alpha, &[]).unwrap(), q(1, 1));
        assert!(poisson_moment(&alpha, &[vec![q(1, 1)]]).is_err());
    }
}
