use serde::{Serialize, Serializer};

use super::case::IdentityCase;
use super::estimate::{estimate_lhs, estimate_rhs};
use super::exact::exact_value;
use crate::error::Result;
use crate::scalar::{format_rational, Field};
use crate::stats::{agree, near, z_score, Estimate};
use crate::Rational;

/// Agreement threshold in combined standard errors.
pub const PASS_SIGMAS: f64 = 3.0;
/// Distance of each side from the exact value, in its own standard errors.
pub const EXACT_SIGMAS: f64 = 4.0;
/// Absolute slack on the exact-value check.
pub const EXACT_SLACK: f64 = 1e-9;

/// Both sides of one identity case.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub identity: String,
    pub beta: f64,
    pub functional_id: String,
    pub sample_count: usize,
    pub lhs_mean: f64,
    pub lhs_std_err: f64,
    pub rhs_mean: f64,
    pub rhs_std_err: f64,
    pub z_score: f64,
    /// `|lhs − rhs| ≤ 3 · sqrt(se_l² + se_r²)`.
    pub pass: bool,
    #[serde(serialize_with = "ser_rational")]
    pub exact_value: Option<Rational>,
    /// Both means within four of their own standard errors of the exact value.
    pub exact_pass: Option<bool>,
}

fn ser_rational<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_some(&format_rational(q)),
        None => s.serialize_none(),
    }
}

impl VerificationReport {
    /// Builds a report from two estimates and an optional exact value.
    pub fn from_estimates(
        identity: impl Into<String>,
        beta: f64,
        functional_id: impl Into<String>,
        lhs: Estimate,
        rhs: Estimate,
        exact: Option<Rational>,
    ) -> Self {
        let exact_pass = exact.as_ref().map(|q| {
            let v = q.to_real();
            near(&lhs, v, EXACT_SIGMAS, EXACT_SLACK) && near(&rhs, v, EXACT_SIGMAS, EXACT_SLACK)
        });
        Self {
            identity: identity.into(),
            beta,
            functional_id: functional_id.into(),
            sample_count: lhs.count as usize,
            lhs_mean: lhs.mean,
            lhs_std_err: lhs.std_err,
            rhs_mean: rhs.mean,
            rhs_std_err: rhs.std_err,
            z_score: z_score(&lhs, &rhs),
            pass: agree(&lhs, &rhs, PASS_SIGMAS),
            exact_value: exact,
            exact_pass,
        }
    }

    pub fn lhs(&self) -> Estimate {
        Estimate {
            mean: self.lhs_mean,
            std_err: self.lhs_std_err,
            count: self.sample_count as u64,
        }
    }

    pub fn rhs(&self) -> Estimate {
        Estimate {
            mean: self.rhs_mean,
            std_err: self.rhs_std_err,
            count: self.sample_count as u64,
        }
    }

    /// Agreement and, when an exact value exists, the exact-value check.
    pub fn all_pass(&self) -> bool {
        self.pass && self.exact_pass != Some(false)
    }
}

/// Runs both sides on independent substreams and compares them.
pub fn verify_identity(case: &IdentityCase) -> Result<VerificationReport> {
    let lhs = estimate_lhs(case)?;
    let rhs = estimate_rhs(case)?;
    let exact = exact_value(case.identity, &case.sigma, &case.functional);
    Ok(VerificationReport::from_estimates(
        case.identity.as_str(),
        case.sigma.beta(),
        case.functional.id(),
        lhs,
        rhs,
        exact,
    ))
}
