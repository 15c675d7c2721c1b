//! The Markov operator `η ↦ (1 − t)η + tδ_x`, `(x, t) ~ σ̄ ⊗ Beta[1, β]`,
//! whose unique invariant law is `𝒟_σ`.
//!
//! [`run_trajectory`] pushes an ensemble of independent chains through the
//! operator and tracks how far their partition marginals are from the
//! Dirichlet ones. Convergence from arbitrary starting laws is observed, not
//! assumed.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, DiscreteMeasure, IntensityMeasure, MeasureKind, Partition};
use crate::moments::{dirichlet_moments_upto, exact_cell_masses};
use crate::rng::RngStream;
use crate::samplers::{sample_beta_one, sample_dirichlet_ferguson, StickBreakingConfig};
use crate::scalar::Real;
use crate::stats::{beta_cdf, ks_statistic, Estimate, Welford};

/// Highest moment order tracked per cell.
pub const MAX_MOMENT_ORDER: usize = 3;
/// Largest partition the diagnostics accept.
pub const MAX_CELLS: usize = 3;

/// One step of the operator.
pub fn apply_operator<F: Real, R: Rng + ?Sized>(
    eta: &DiscreteMeasure<F>,
    sigma: &IntensityMeasure<F>,
    rng: &mut R,
) -> Result<DiscreteMeasure<F>> {
    let x = sigma.sample_location(rng);
    let t = sample_beta_one(sigma.beta(), rng);
    eta.convex_step(x, t)
}

/// Starting law of every chain in the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InitialLaw {
    /// `δ_{1/2}`.
    PointMassAtDeltaHalf,
    /// `(1/m) Σ_j δ_{(j − 1/2)/m}`.
    PointMassAtUniformDiscretization(usize),
    /// Independent draws from `𝒟_σ`.
    EmpiricalDf,
}

impl InitialLaw {
    fn initial<R: Rng + ?Sized>(
        &self,
        sigma: &IntensityMeasure<f64>,
        rng: &mut R,
    ) -> Result<DiscreteMeasure<f64>> {
        match *self {
            InitialLaw::PointMassAtDeltaHalf => DiscreteMeasure::dirac(0.5),
            InitialLaw::PointMassAtUniformDiscretization(m) => {
                let atoms = (0..m)
                    .map(|j| Atom::new((j as f64 + 0.5) / m as f64, 1.0 / m as f64))
                    .collect::<Result<Vec<_>>>()?;
                DiscreteMeasure::new(MeasureKind::ProbabilityMeasure, atoms)
            }
            InitialLaw::EmpiricalDf => {
                sample_dirichlet_ferguson(sigma, &StickBreakingConfig::default(), rng)
            }
        }
    }
}

impl fmt::Display for InitialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialLaw::PointMassAtDeltaHalf => f.write_str("delta-half"),
            InitialLaw::PointMassAtUniformDiscretization(m) => write!(f, "uniform:{m}"),
            InitialLaw::EmpiricalDf => f.write_str("df"),
        }
    }
}

/// Parses `delta-half`, `uniform:<m>` or `df`.
impl FromStr for InitialLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta-half" => Ok(InitialLaw::PointMassAtDeltaHalf),
            "df" => Ok(InitialLaw::EmpiricalDf),
            _ => s
                .strip_prefix("uniform:")
                .and_then(|m| m.parse().ok())
                .map(InitialLaw::PointMassAtUniformDiscretization)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "unknown initial law {s:?}; expected delta-half, uniform:<m> or df"
                    ))
                }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperatorTrajectory {
    pub initial_law: InitialLaw,
    /// Number of operator steps `T`.
    pub iterates: usize,
    /// Number of chains `M`.
    pub ensemble_size: usize,
}

impl OperatorTrajectory {
    pub fn new(initial_law: InitialLaw, iterates: usize, ensemble_size: usize) -> Result<Self> {
        let cfg = Self {
            initial_law,
            iterates,
            ensemble_size,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensemble_size < 2 {
            return Err(Error::InvalidParameter(format!(
                "ensemble size {} must be at least 2",
                self.ensemble_size
            )));
        }
        if self.initial_law == InitialLaw::PointMassAtUniformDiscretization(0) {
            return Err(Error::InvalidParameter(
                "uniform discretization needs m ≥ 1 atoms".into(),
            ));
        }
        Ok(())
    }
}

/// Ensemble mean of `η(X_c)^n` against its Dirichlet value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentGap {
    pub order: usize,
    pub cell: usize,
    pub mean: f64,
    pub std_err: f64,
    pub exact: f64,
    pub gap: f64,
}

impl MomentGap {
    pub fn estimate(&self, count: usize) -> Estimate {
        Estimate {
            mean: self.gap,
            std_err: self.std_err,
            count: count as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepDiagnostics {
    pub step: usize,
    /// Ordered by cell, then by moment order.
    pub moment_gaps: Vec<MomentGap>,
    pub moment_gap_max_abs: f64,
    /// KS distance of each cell mass against `Beta[α_c, β − α_c]`.
    pub ks_distance_per_cell: Vec<f64>,
    /// Mass still carried by the chain's starting atoms.
    pub surviving_mass: Estimate,
    /// `(β/(β + 1))^step`.
    pub surviving_mass_expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrajectoryReport {
    pub config: OperatorTrajectory,
    pub beta: f64,
    pub cell_masses: Vec<f64>,
    /// Steps `0..=T`; step 0 is the initial ensemble.
    pub steps: Vec<StepDiagnostics>,
}

impl TrajectoryReport {
    pub fn final_step(&self) -> &StepDiagnostics {
        self.steps.last().expect("step 0 is always recorded")
    }

    /// Whether every moment gap at step `b` is within `k` combined standard
    /// errors of the same gap at step `a`.
    pub fn gaps_agree(&self, a: usize, b: usize, k: f64) -> bool {
        let m = self.config.ensemble_size;
        let (sa, sb) = (&self.steps[a], &self.steps[b]);
        sa.moment_gaps
            .iter()
            .zip(&sb.moment_gaps)
            .all(|(x, y)| crate::stats::agree(&x.estimate(m), &y.estimate(m), k))
    }

    /// Whether the surviving mass is within `k` standard errors of
    /// `(β/(β + 1))^T` at every step up to `horizon`.
    ///
    /// The surviving mass is a product of `T` independent factors and grows
    /// heavy-tailed, so its sample standard error is only trustworthy for
    /// moderate `T`; hence the horizon.
    pub fn surviving_mass_tracks(&self, horizon: usize, k: f64) -> bool {
        self.steps
            .iter()
            .take(horizon + 1)
            .all(|s| crate::stats::near(&s.surviving_mass, s.surviving_mass_expected, k, 1e-12))
    }
}

struct Chain {
    eta: DiscreteMeasure<f64>,
    /// Sorted starting atom locations.
    origin: Vec<f64>,
    rng: RngStream,
}

impl Chain {
    fn surviving_mass(&self) -> f64 {
        self.origin.iter().map(|&x| self.eta.atom_mass_at(x)).sum()
    }

    fn step(&mut self, sigma: &IntensityMeasure<f64>) {
        let x = sigma.sample_location(&mut self.rng);
        let t = sample_beta_one(sigma.beta(), &mut self.rng);
        self.eta.convex_step_in_place(x, t);
    }
}

/// Runs `M` chains for `T` steps and records diagnostics after each step.
///
/// Chain `i` uses `rng.substream(i)` for its starting measure and every
/// step, so the report does not depend on the number of worker threads.
pub fn run_trajectory(
    config: &OperatorTrajectory,
    sigma: &IntensityMeasure<f64>,
    partition: &Partition<f64>,
    rng: &RngStream,
) -> Result<TrajectoryReport> {
    config.validate()?;
    partition.validate_for(sigma)?;
    let k = partition.cells();
    if !(2..=MAX_CELLS).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "diagnostics need a partition of 2 to {MAX_CELLS} cells, got {k}"
        )));
    }
    let beta = sigma.beta();
    let alpha: Vec<f64> = exact_cell_masses(sigma, partition)?;
    let mut exact = Vec::with_capacity(k);
    for c in 0..k {
        let e: Vec<f64> = (0..k).map(|j| if j == c { 1.0 } else { 0.0 }).collect();
        exact.push(dirichlet_moments_upto(&alpha, &e, MAX_MOMENT_ORDER)?);
    }

    let mut chains: Vec<Chain> = (0..config.ensemble_size)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i as u64);
            let eta = config.initial_law.initial(sigma, &mut r)?;
            let origin = eta.atoms().iter().map(|a| a.location).collect();
            Ok(Chain {
                eta,
                origin,
                rng: r,
            })
        })
        .collect::<Result<_>>()?;

    let keep = beta / (beta + 1.0);
    let mut steps = Vec::with_capacity(config.iterates + 1);
    for step in 0..=config.iterates {
        if step > 0 {
            chains.par_iter_mut().for_each(|c| c.step(sigma));
        }
        let observed: Vec<(Vec<f64>, f64)> = chains
            .par_iter()
            .map(|c| (partition.cell_masses(&c.eta), c.surviving_mass()))
            .collect();
        steps.push(diagnose(
            step,
            &observed,
            &alpha,
            beta,
            &exact,
            keep.powi(step as i32),
        ));
    }
    Ok(TrajectoryReport {
        config: *config,
        beta,
        cell_masses: alpha,
        steps,
    })
}

fn diagnose(
    step: usize,
    observed: &[(Vec<f64>, f64)],
    alpha: &[f64],
    beta: f64,
    exact: &[Vec<f64>],
    surviving_mass_expected: f64,
) -> StepDiagnostics {
    let k = alpha.len();
    let mut moment_gaps = Vec::with_capacity(k * MAX_MOMENT_ORDER);
    let mut ks_distance_per_cell = Vec::with_capacity(k);
    for c in 0..k {
        let ys: Vec<f64> = observed.iter().map(|(cells, _)| cells[c]).collect();
        for n in 1..=MAX_MOMENT_ORDER {
            let acc: Welford = ys.iter().map(|y| y.powi(n as i32)).collect();
            let mean = acc.mean();
            moment_gaps.push(MomentGap {
                order: n,
                cell: c,
                mean,
                std_err: acc.std_err(),
                exact: exact[c][n],
                gap: mean - exact[c][n],
            });
        }
        let (a, b) = (alpha[c], beta - alpha[c]);
        ks_distance_per_cell.push(ks_statistic(&ys, |x| beta_cdf(x, a, b)));
    }
    let moment_gap_max_abs = moment_gaps.iter().map(|g| g.gap.abs()).fold(0.0, f64::max);
    let surviving: Welford = observed.iter().map(|(_, s)| *s).collect();
    StepDiagnostics {
        step,
        moment_gaps,
        moment_gap_max_abs,
        ks_distance_per_cell,
        surviving_mass: surviving.estimate(),
        surviving_mass_expected,
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CsvRow {
    step: usize,
    moment_order: usize,
    cell_index: usize,
    gap: f64,
    ks_distance: f64,
}

/// `step, momentOrder, cellIndex, gap, ksDistance`, one row per step, cell
/// and order.
pub fn write_trajectory_csv<W: Write>(report: &TrajectoryReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in &report.steps {
        for g in &s.moment_gaps {
            w.serialize(CsvRow {
                step: s.step,
                moment_order: g.order,
                cell_index: g.cell,
                gap: g.gap,
                ks_distance: s.ks_distance_per_cell[g.cell],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
