//! Moment tables: exact recurrence values next to the quadrature oracle.

use std::io::Write;

use serde::Serialize;

use super::quadrature::{oracle_applies, simplex_quadrature_oracle, SimplexPolynomial};
use super::recurrence::{cycle_index, dirichlet_moments_upto, PowerSums};
use crate::error::Result;
use crate::scalar::{format_rational, Field};
use crate::Rational;

/// Oracle agreement demanded of every row.
pub const TABLE_TOLERANCE: f64 = 1e-6;

/// One row of a moment table, `E_{Dir[α]}[(s·y)^n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow {
    pub alpha: Vec<Rational>,
    pub s: Vec<Rational>,
    pub n: usize,
    pub exact: Rational,
    /// Absent when the oracle does not cover `α`.
    pub oracle: Option<f64>,
    pub abs_diff: Option<f64>,
    /// `Z_n` at the power sums, present when `|α| = 1`.
    pub cycle_index: Option<Rational>,
}

impl MomentRow {
    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn within_tolerance(&self) -> bool {
        self.abs_diff.is_none_or(|d| d <= TABLE_TOLERANCE)
    }
}

/// Rows for `n = 0, …, max_n`. The oracle column is filled only where
/// [`oracle_applies`].
pub fn moment_table(
    alpha: &[Rational],
    s: &[Rational],
    max_n: usize,
    resolution: usize,
) -> Result<Vec<MomentRow>> {
    let exact = dirichlet_moments_upto(alpha, s, max_n)?;
    let alpha_f: Vec<f64> = alpha.iter().map(Field::to_real).collect();
    let s_f: Vec<f64> = s.iter().map(Field::to_real).collect();
    let total = alpha
        .iter()
        .fold(Rational::from_integer(0.into()), |a, b| a + b);
    let powers = PowerSums::from_vectors(s, alpha, max_n)?;
    let mut rows = Vec::with_capacity(max_n + 1);
    for (n, value) in exact.into_iter().enumerate() {
        let oracle = if oracle_applies(&alpha_f) {
            let poly = SimplexPolynomial::linear_power(s_f.clone(), n);
            Some(simplex_quadrature_oracle(&alpha_f, &poly, resolution)?)
        } else {
            None
        };
        let cycle = if total.is_unit() {
            Some(cycle_index(n, &powers)?)
        } else {
            None
        };
        rows.push(MomentRow {
            alpha: alpha.to_vec(),
            s: s.to_vec(),
            n,
            abs_diff: oracle.map(|o| (value.to_real() - o).abs()),
            exact: value,
            oracle,
            cycle_index: cycle,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CsvRow {
    k: usize,
    alpha: String,
    s: String,
    n: usize,
    exact_value: String,
    oracle_value: Option<f64>,
    abs_diff: Option<f64>,
    cycle_index_value: String,
}

fn join(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(";")
}

/// CSV with columns `k, alpha, s, n, exactValue, oracleValue, absDiff,
/// cycleIndexValue`; vectors are `;`-separated, rationals are `p/q`.
pub fn write_moment_csv<W: Write>(rows: &[MomentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            k: r.k(),
            alpha: join(&r.alpha),
            s: join(&r.s),
            n: r.n,
            exact_value: format_rational(&r.exact),
            oracle_value: r.oracle,
            abs_diff: r.abs_diff,
            cycle_index_value: r
                .cycle_index
                .as_ref()
                .map(format_rational)
                .unwrap_or_default(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn uniform_table() {
        let rows = moment_table(&[q(1, 1), q(1, 1)], &[q(1, 1), q(0, 1)], 5, 256).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].exact, q(1, 1));
        for r in &rows {
            // E[Y^n] for uniform Y.
            assert_eq!(r.exact, q(1, r.n as i64 + 1));
            assert!(r.within_tolerance());
            assert!(r.cycle_index.is_none());
        }
    }

    #[test]
    fn unit_mass_rows_carry_cycle_index() {
        let rows = moment_table(&[q(1, 2), q(1, 2)], &[q(2, 1), q(-1, 3)], 4, 256).unwrap();
        for r in &rows {
            assert_eq!(r.cycle_index.as_ref(), Some(&r.exact));
        }
    }

    #[test]
    fn oracle_column_is_empty_outside_its_domain() {
        let alpha = [q(1, 2), q(1, 3), q(1, 6)];
        let rows = moment_table(&alpha, &[q(1, 1), q(0, 1), q(-2, 1)], 3, 256).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.oracle.is_none() && r.within_tolerance()));
        assert!(rows
            .iter()
            .all(|r| r.cycle_index.as_ref() == Some(&r.exact)));
        let mut buf = Vec::new();
        write_moment_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "3,1/2;1/3;1/6,1;0;-2,0,1,,,1");
    }

    #[test]
    fn csv_layout() {
        let rows = moment_table(&[q(1, 2), q(1, 2)], &[q(1, 1), q(0, 1)], 1, 256).unwrap();
        let mut buf = Vec::new();
        write_moment_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,alpha,s,n,exactValue,oracleValue,absDiff,cycleIndexValue"
        );
        assert!(lines.next().unwrap().starts_with("2,1/2;1/2,1;0,0,1,"));
    }
}
