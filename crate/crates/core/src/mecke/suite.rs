//! The shipped default suite: every identity at `β ∈ {1/2, 1, 2}` with four
//! polynomial functionals each.

use std::io::Write;

use serde::Serialize;

use super::case::{Identity, IdentityCase};
use super::report::{verify_identity, VerificationReport};
use crate::error::Result;
use crate::measure::{Arity, Expr, IntensityMeasure, Partition, TestFunctional};
use crate::rng::RngStream;

pub const SUITE_BETAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const FUNCTIONALS_PER_ARITY: usize = 4;
/// Substream of a case's stream used for its adjudication rerun.
pub const RERUN_STREAM: u64 = 2;

/// Partition `[0, 0.3), [0.3, 0.7), [0.7, 1]`.
pub fn suite_partition() -> Partition<f64> {
    Partition::new(vec![0.0, 0.3, 0.7, 1.0]).expect("valid breakpoints")
}

/// Four functionals of the given arity on [`suite_partition`], of degrees
/// 0 to 3, built from `g_0 = (1/2, 2, 1)` and `g_1 = 1_{[0, 0.3)}`.
pub fn suite_functionals(arity: Arity) -> Vec<TestFunctional<f64>> {
    let functions = vec![vec![0.5, 2.0, 1.0], vec![1.0, 0.0, 0.0]];
    let p = || Expr::pairing(0);
    let q = || Expr::pairing(1);
    let exprs: Vec<(&str, Expr<f64>)> = match arity {
        Arity::G => vec![
            ("g_const", Expr::constant(1.5)),
            ("g_linear", p()),
            ("g_quadratic", p() * q()),
            ("g_cubic", p().pow(2) * q() + Expr::constant(0.5)),
        ],
        Arity::F => vec![
            ("f_const", Expr::constant(1.0)),
            ("f_point", Expr::point(0)),
            ("f_quadratic", Expr::point(1) * p()),
            ("f_cubic", Expr::point(0) * q().pow(2) + p()),
        ],
        Arity::R => vec![
            ("r_const", Expr::constant(1.0)),
            ("r_mass", Expr::mass()),
            ("r_mass_point", Expr::mass() * Expr::point(0)),
            (
                "r_cubic",
                Expr::mass().pow(2) * Expr::point(0) + Expr::mass() * q(),
            ),
        ],
    };
    exprs
        .into_iter()
        .map(|(id, e)| {
            TestFunctional::new(id, arity, suite_partition(), functions.clone(), e)
                .expect("valid functional")
        })
        .collect()
}

/// The default cases, case `i` on `rng.substream(i)`.
pub fn default_suite(sample_count: usize, rng: &RngStream) -> Result<Vec<IdentityCase>> {
    let sigmas = SUITE_BETAS
        .iter()
        .map(|&b| IntensityMeasure::uniform(b))
        .collect::<Result<Vec<_>>>()?;
    suite_cases(&Identity::ALL, &sigmas, sample_count, rng)
}

/// Every selected identity at every intensity with the four
/// [`suite_functionals`] of matching arity.
///
/// A case's stream is `rng.substream(i)` with `i` its position in the full
/// grid `Identity::ALL × sigmas × functionals`, so dropping identities from
/// the selection leaves the other cases unchanged.
pub fn suite_cases(
    identities: &[Identity],
    sigmas: &[IntensityMeasure<f64>],
    sample_count: usize,
    rng: &RngStream,
) -> Result<Vec<IdentityCase>> {
    let per_identity = sigmas.len() * FUNCTIONALS_PER_ARITY;
    let mut cases = Vec::new();
    for (i, identity) in Identity::ALL.into_iter().enumerate() {
        if !identities.contains(&identity) {
            continue;
        }
        for (j, sigma) in sigmas.iter().enumerate() {
            for (l, f) in suite_functionals(identity.arity()).into_iter().enumerate() {
                let index = i * per_identity + j * FUNCTIONALS_PER_ARITY + l;
                cases.push(IdentityCase::new(
                    identity,
                    sigma.clone(),
                    f,
                    sample_count,
                    rng.substream(index as u64),
                )?);
            }
        }
    }
    Ok(cases)
}

/// One case, with a rerun on a fresh stream if the first run flagged.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteEntry {
    pub report: VerificationReport,
    pub rerun: Option<VerificationReport>,
    /// The first run passed, or its rerun did.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
    pub flagged: usize,
    pub pass: bool,
}

/// Runs a single case with adjudication.
///
/// At three standard errors an exact identity still flags about 0.3% of
/// runs; a flagged case is rerun once on an independent stream and passes
/// if the rerun does. Both reports are kept.
pub fn run_case(case: &IdentityCase) -> Result<SuiteEntry> {
    let report = verify_identity(case)?;
    if report.all_pass() {
        return Ok(SuiteEntry {
            report,
            rerun: None,
            pass: true,
        });
    }
    let again = case.clone().with_rng(case.rng().substream(RERUN_STREAM));
    let rerun = verify_identity(&again)?;
    let pass = rerun.all_pass();
    Ok(SuiteEntry {
        report,
        rerun: Some(rerun),
        pass,
    })
}

pub fn run_suite(cases: &[IdentityCase]) -> Result<SuiteReport> {
    let entries = cases.iter().map(run_case).collect::<Result<Vec<_>>>()?;
    let flagged = entries.iter().filter(|e| e.rerun.is_some()).count();
    let pass = entries.iter().all(|e| e.pass);
    Ok(SuiteReport {
        entries,
        flagged,
        pass,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CsvRow<'a> {
    identity: &'a str,
    beta: f64,
    functional_id: &'a str,
    n: usize,
    lhs_mean: f64,
    rhs_mean: f64,
    z_score: f64,
    pass: bool,
}

impl<'a> From<&'a VerificationReport> for CsvRow<'a> {
    fn from(r: &'a VerificationReport) -> Self {
        Self {
            identity: &r.identity,
            beta: r.beta,
            functional_id: &r.functional_id,
            n: r.sample_count,
            lhs_mean: r.lhs_mean,
            rhs_mean: r.rhs_mean,
            z_score: r.z_score,
            pass: r.all_pass(),
        }
    }
}

/// One summary row per report: `identity, beta, functionalId, n, lhsMean,
/// rhsMean, zScore, pass`.
pub fn write_reports_csv<'a, W: Write>(
    reports: impl IntoIterator<Item = &'a VerificationReport>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Suite summary: one row per run, reruns directly after the case they
/// adjudicate.
pub fn write_suite_csv<W: Write>(report: &SuiteReport, out: W) -> Result<()> {
    let rows = report
        .entries
        .iter()
        .flat_map(|e| std::iter::once(&e.report).chain(e.rerun.as_ref()));
    write_reports_csv(rows, out)
}
