use std::io::Write;
use std::path::{Path, PathBuf};

use mecke_core::fixedpoint::{
    run_trajectory, write_trajectory_csv, InitialLaw, OperatorTrajectory,
};
use mecke_core::measure::{DiscreteMeasure, IntensityMeasure, Partition};
use mecke_core::mecke::{
    default_suite, run_suite, suite_cases, write_suite_csv, Identity, SuiteReport, SUITE_BETAS,
};
use mecke_core::moments::{moment_table, write_moment_csv, MomentRow, MIN_RESOLUTION};
use mecke_core::parallel::{collect_samples, with_threads};
use mecke_core::rng::DEFAULT_SEED;
use mecke_core::samplers::{
    sample_dirichlet, sample_dirichlet_ferguson, sample_gamma_measure, sample_gamma_measure_levy,
    sample_poisson_pp, StickBreakingConfig,
};
use mecke_core::scalar::format_rational;
use mecke_core::stats::{near, Welford};
use mecke_core::{Error, Rational, Result, RngStream};
use serde::Serialize;

use crate::config::{
    parse_rationals, parse_reals, resolve_sigma, CommandName, FileConfig, Format, SampleKind,
};
use crate::{
    Cli, Command, FixedpointArgs, MomentsArgs, OutputArgs, SampleArgs, SuiteArgs, VerifyArgs,
};

const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_SUITE_SAMPLES: usize = 100_000;
const DEFAULT_LEVY_CUTOFF: f64 = 1e-4;
const DEFAULT_MAX_ORDER: usize = 5;
const DEFAULT_ITERATES: usize = 200;
const DEFAULT_ENSEMBLE: usize = 10_000;
/// Largest deviation of a probability measure's total mass from one.
const MASS_TOLERANCE: f64 = 1e-12;

/// Runs the parsed command line; `Ok(false)` is a statistical failure.
pub fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let command = match cli.command {
        Some(c) => {
            if let Some(name) = file.command {
                if name != command_name(&c) {
                    return Err(Error::InvalidParameter(format!(
                        "config file is for {name:?}, not this subcommand"
                    )));
                }
            }
            c
        }
        None => match file.command {
            Some(CommandName::Sample) => Command::Sample(SampleArgs::empty()),
            Some(CommandName::Moments) => Command::Moments(MomentsArgs::empty()),
            Some(CommandName::Verify) => Command::Verify(VerifyArgs::empty()),
            Some(CommandName::Fixedpoint) => Command::Fixedpoint(FixedpointArgs::empty()),
            Some(CommandName::Suite) => Command::Suite(SuiteArgs::empty()),
            None => {
                return Err(Error::InvalidParameter(
                    "no subcommand given (see --help) and no command in the config file".into(),
                ))
            }
        },
    };
    match command {
        Command::Sample(a) => sample(a, &file),
        Command::Moments(a) => moments(a, &file),
        Command::Verify(a) => verify(a, &file),
        Command::Fixedpoint(a) => fixedpoint(a, &file),
        Command::Suite(a) => suite(a, &file),
    }
}

fn command_name(c: &Command) -> CommandName {
    match c {
        Command::Sample(_) => CommandName::Sample,
        Command::Moments(_) => CommandName::Moments,
        Command::Verify(_) => CommandName::Verify,
        Command::Fixedpoint(_) => CommandName::Fixedpoint,
        Command::Suite(_) => CommandName::Suite,
    }
}

macro_rules! empty_args {
    ($($t:ident { $($f:ident),* }),*) => {$(
        impl $t {
            fn empty() -> Self {
                Self { $($f: Default::default(),)* output: OutputArgs::default() }
            }
        }
    )*};
}

empty_args!(
    SampleArgs {
        kind,
        sigma,
        alpha,
        levy_cutoff,
        samples
    },
    MomentsArgs {
        alpha,
        s,
        max_order,
        resolution
    },
    VerifyArgs {
        identity,
        beta,
        density,
        samples
    },
    FixedpointArgs {
        initial_law,
        iterates,
        ensemble,
        partition,
        sigma
    },
    SuiteArgs { samples }
);

/// Output settings after merging flags with the config file.
struct Output {
    seed: u64,
    threads: Option<usize>,
    path: Option<PathBuf>,
    format: Format,
}

impl Output {
    fn resolve(args: OutputArgs, file: &FileConfig, default_format: Format) -> Self {
        Self {
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            threads: args.threads.or(file.threads),
            path: args.out.or_else(|| file.output_path.clone()),
            format: args.format.or(file.format).unwrap_or(default_format),
        }
    }

    fn rng(&self) -> RngStream {
        RngStream::new(self.seed, 0)
    }

    /// Runs `work` on the requested number of threads.
    fn compute<T: Send>(&self, work: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        with_threads(self.threads, work)?
    }

    /// Writes the finished output in one go, so a failed run leaves no file
    /// behind.
    fn emit(&self, bytes: &[u8]) -> Result<()> {
        match &self.path {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
            Some(path) => write_file(path, bytes)?,
        }
        Ok(())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| {
        let _ = std::fs::remove_file(path);
        Error::Output(format!("{}: {e}", path.display()))
    })
}

fn positive_samples(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    Ok(n)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

// --- sample ---------------------------------------------------------------

enum Draw {
    Measure(DiscreteMeasure<f64>),
    Vector(Vec<f64>),
}

impl Draw {
    fn values(&self) -> (f64, f64) {
        match self {
            Draw::Measure(m) => (m.len() as f64, m.total_mass()),
            Draw::Vector(y) => (
                y.len() as f64,
                mecke_core::measure::compensated_sum(y.iter().copied()),
            ),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SummaryCheck {
    quantity: &'static str,
    observed: f64,
    std_err: f64,
    expected: f64,
    pass: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SampleSummary {
    count: usize,
    mean_atom_count: f64,
    atom_count_std_err: f64,
    mean_total_mass: f64,
    total_mass_std_err: f64,
    check: SummaryCheck,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SampleOutput<'a> {
    kind: SampleKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<&'a IntensityMeasure<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<&'a [f64]>,
    seed: u64,
    samples: Vec<serde_json::Value>,
    summary: SampleSummary,
}

fn sample(args: SampleArgs, file: &FileConfig) -> Result<bool> {
    let kind = args
        .kind
        .or(file.kind)
        .ok_or_else(|| Error::InvalidParameter("--kind is required".into()))?;
    let samples = positive_samples(args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES))?;
    let out = Output::resolve(args.output, file, Format::Csv);
    let alpha = match kind {
        SampleKind::Dirichlet => {
            let text = args
                .alpha
                .as_deref()
                .or(file.alpha.as_deref())
                .ok_or_else(|| Error::InvalidParameter("--kind dirichlet needs --alpha".into()))?;
            let alpha = parse_reals(text)?;
            // Surface parameter errors before any sampling.
            sample_dirichlet(&alpha, &mut RngStream::new(0, 0))?;
            Some(alpha)
        }
        _ => None,
    };
    let sigma = match kind {
        SampleKind::Dirichlet => None,
        _ => Some(resolve_sigma(
            args.sigma.beta,
            args.sigma.density.as_deref(),
            file,
            1.0,
        )?),
    };
    let cutoff = args
        .levy_cutoff
        .or(file.levy_cutoff)
        .unwrap_or(DEFAULT_LEVY_CUTOFF);
    let rng = out.rng();
    let cfg = StickBreakingConfig::default();
    let draws = out.compute(|| {
        collect_samples(samples, &rng, |r| {
            Ok(match kind {
                SampleKind::Poisson => {
                    Draw::Measure(sample_poisson_pp(sigma.as_ref().unwrap(), r)?)
                }
                SampleKind::Gamma => {
                    Draw::Measure(sample_gamma_measure(sigma.as_ref().unwrap(), &cfg, r)?)
                }
                SampleKind::GammaLevy => Draw::Measure(sample_gamma_measure_levy(
                    sigma.as_ref().unwrap(),
                    cutoff,
                    r,
                )?),
                SampleKind::Df => {
                    Draw::Measure(sample_dirichlet_ferguson(sigma.as_ref().unwrap(), &cfg, r)?)
                }
                SampleKind::Dirichlet => {
                    Draw::Vector(sample_dirichlet(alpha.as_ref().unwrap(), r)?.into_inner())
                }
            })
        })
    })?;

    let summary = summarize(kind, sigma.as_ref(), cutoff, &draws);
    let pass = summary.check.pass;
    let bytes = match out.format {
        Format::Json => json_bytes(&SampleOutput {
            kind,
            sigma: sigma.as_ref(),
            alpha: alpha.as_deref(),
            seed: out.seed,
            samples: draws
                .iter()
                .map(|d| match d {
                    Draw::Measure(m) => serde_json::json!(m
                        .atoms()
                        .iter()
                        .map(|a| [a.location, a.mass])
                        .collect::<Vec<_>>()),
                    Draw::Vector(y) => serde_json::json!(y),
                })
                .collect(),
            summary,
        })?,
        Format::Csv => sample_csv(&draws, &summary)?,
    };
    out.emit(&bytes)?;
    Ok(pass)
}

fn summarize(
    kind: SampleKind,
    sigma: Option<&IntensityMeasure<f64>>,
    cutoff: f64,
    draws: &[Draw],
) -> SampleSummary {
    let mut atoms = Welford::new();
    let mut mass = Welford::new();
    let mut worst = 0.0f64;
    for d in draws {
        let (n, m) = d.values();
        atoms.push(n);
        mass.push(m);
        worst = worst.max((m - 1.0).abs());
    }
    let beta = sigma.map(|s| s.beta()).unwrap_or(1.0);
    let statistical = |quantity, est: &Welford, expected: f64| {
        let e = est.estimate();
        SummaryCheck {
            quantity,
            observed: e.mean,
            std_err: e.std_err,
            expected,
            pass: near(&e, expected, 3.0, 1e-12),
        }
    };
    let check = match kind {
        SampleKind::Poisson => statistical("atomCount", &atoms, beta),
        SampleKind::Gamma => statistical("totalMass", &mass, beta),
        SampleKind::GammaLevy => statistical("totalMass", &mass, beta * (-cutoff).exp()),
        SampleKind::Df | SampleKind::Dirichlet => SummaryCheck {
            quantity: "maxTotalMassDeviation",
            observed: worst,
            std_err: 0.0,
            expected: 0.0,
            pass: worst <= MASS_TOLERANCE,
        },
    };
    SampleSummary {
        count: draws.len(),
        mean_atom_count: atoms.mean(),
        atom_count_std_err: atoms.std_err(),
        mean_total_mass: mass.mean(),
        total_mass_std_err: mass.std_err(),
        check,
    }
}

/// Long format `sample,location,mass` for measures, one row per draw
/// `sample,y0,y1,…` for vectors, then `#`-prefixed summary lines.
fn sample_csv(draws: &[Draw], summary: &SampleSummary) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match draws.first() {
        Some(Draw::Vector(y)) => {
            let mut header = vec!["sample".to_string()];
            header.extend((0..y.len()).map(|i| format!("y{i}")));
            w.write_record(&header)?;
        }
        _ => w.write_record(["sample", "location", "mass"])?,
    }
    for (i, d) in draws.iter().enumerate() {
        match d {
            Draw::Measure(m) => {
                for a in m.atoms() {
                    w.serialize((i, a.location, a.mass))?;
                }
            }
            Draw::Vector(y) => {
                w.write_field(i.to_string())?;
                for v in y {
                    w.write_field(v.to_string())?;
                }
                w.write_record(None::<&[u8]>)?;
            }
        }
    }
    let mut bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
    let c = &summary.check;
    writeln!(
        bytes,
        "# count={} meanAtomCount={} atomCountStdErr={} meanTotalMass={} totalMassStdErr={}",
        summary.count,
        summary.mean_atom_count,
        summary.atom_count_std_err,
        summary.mean_total_mass,
        summary.total_mass_std_err
    )?;
    writeln!(
        bytes,
        "# check={} observed={} stdErr={} expected={} pass={}",
        c.quantity, c.observed, c.std_err, c.expected, c.pass
    )?;
    Ok(bytes)
}

// --- moments --------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MomentJson {
    k: usize,
    alpha: Vec<String>,
    s: Vec<String>,
    n: usize,
    exact_value: String,
    oracle_value: Option<f64>,
    abs_diff: Option<f64>,
    cycle_index_value: Option<String>,
    pass: bool,
}

fn row_pass(r: &MomentRow) -> bool {
    r.within_tolerance() && r.cycle_index.as_ref().is_none_or(|z| *z == r.exact)
}

fn moments(args: MomentsArgs, file: &FileConfig) -> Result<bool> {
    let out = Output::resolve(args.output, file, Format::Csv);
    let alpha_text = args
        .alpha
        .as_deref()
        .or(file.alpha.as_deref())
        .ok_or_else(|| Error::InvalidParameter("--alpha is required".into()))?;
    let alpha = parse_rationals(alpha_text)?;
    let s = match args.s.as_deref().or(file.s.as_deref()) {
        Some(text) => parse_rationals(text)?,
        None => (0..alpha.len())
            .map(|i| Rational::from_integer(i32::from(i == 0).into()))
            .collect(),
    };
    let max_order = args
        .max_order
        .or(file.max_order)
        .unwrap_or(DEFAULT_MAX_ORDER);
    let resolution = args
        .resolution
        .or(file.resolution)
        .unwrap_or(MIN_RESOLUTION);
    let rows = out.compute(|| moment_table(&alpha, &s, max_order, resolution))?;
    let pass = rows.iter().all(row_pass);
    let bytes = match out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_moment_csv(&rows, &mut buf)?;
            buf
        }
        Format::Json => {
            let strings = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
            let json: Vec<MomentJson> = rows
                .iter()
                .map(|r| MomentJson {
                    k: r.k(),
                    alpha: strings(&r.alpha),
                    s: strings(&r.s),
                    n: r.n,
                    exact_value: format_rational(&r.exact),
                    oracle_value: r.oracle,
                    abs_diff: r.abs_diff,
                    cycle_index_value: r.cycle_index.as_ref().map(format_rational),
                    pass: row_pass(r),
                })
                .collect();
            json_bytes(&json)?
        }
    };
    out.emit(&bytes)?;
    Ok(pass)
}

// --- verify and suite -----------------------------------------------------

fn emit_suite(out: &Output, report: &SuiteReport) -> Result<bool> {
    let bytes = match out.format {
        Format::Json => json_bytes(report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_suite_csv(report, &mut buf)?;
            buf
        }
    };
    out.emit(&bytes)?;
    Ok(report.pass)
}

fn verify(args: VerifyArgs, file: &FileConfig) -> Result<bool> {
    let out = Output::resolve(args.output, file, Format::Json);
    let samples = args
        .samples
        .or(file.samples)
        .unwrap_or(DEFAULT_SUITE_SAMPLES);
    let identities = if !args.identity.is_empty() {
        args.identity
    } else {
        file.identity
            .clone()
            .unwrap_or_else(|| Identity::ALL.to_vec())
    };
    let base = resolve_sigma(None, args.density.as_deref(), file, 1.0)?;
    let betas: Vec<f64> = match args
        .beta
        .or(file.beta)
        .or(file.sigma_spec.as_ref().map(|s| s.beta))
    {
        Some(b) => vec![b],
        None => SUITE_BETAS.to_vec(),
    };
    let sigmas = betas
        .iter()
        .map(|&b| base.with_beta(b))
        .collect::<Result<Vec<_>>>()?;
    let rng = out.rng();
    let report = out.compute(|| run_suite(&suite_cases(&identities, &sigmas, samples, &rng)?))?;
    emit_suite(&out, &report)
}

fn suite(args: SuiteArgs, file: &FileConfig) -> Result<bool> {
    let out = Output::resolve(args.output, file, Format::Json);
    let samples = args
        .samples
        .or(file.samples)
        .unwrap_or(DEFAULT_SUITE_SAMPLES);
    let rng = out.rng();
    let report = out.compute(|| run_suite(&default_suite(samples, &rng)?))?;
    emit_suite(&out, &report)
}

// --- fixedpoint -----------------------------------------------------------

fn fixedpoint(args: FixedpointArgs, file: &FileConfig) -> Result<bool> {
    let out = Output::resolve(args.output, file, Format::Csv);
    let law = match args.initial_law {
        Some(l) => l,
        None => file
            .initial_law()?
            .unwrap_or(InitialLaw::PointMassAtDeltaHalf),
    };
    let config = OperatorTrajectory::new(
        law,
        args.iterates.or(file.iterates).unwrap_or(DEFAULT_ITERATES),
        args.ensemble
            .or(file.ensemble_size)
            .or(file.samples)
            .unwrap_or(DEFAULT_ENSEMBLE),
    )?;
    let sigma = resolve_sigma(args.sigma.beta, args.sigma.density.as_deref(), file, 1.0)?;
    let partition = match args.partition.as_deref().or(file.partition.as_deref()) {
        Some(text) => Partition::new(parse_reals(text)?)?,
        None => Partition::uniform(2)?,
    };
    let rng = out.rng();
    let report = out.compute(|| run_trajectory(&config, &sigma, &partition, &rng))?;
    let bytes = match out.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory_csv(&report, &mut buf)?;
            buf
        }
    };
    out.emit(&bytes)?;
    Ok(true)
}
