//! The JSON configuration file and the parsing shared by all subcommands.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mecke_core::fixedpoint::InitialLaw;
use mecke_core::measure::{DensitySpec, IntensityMeasure, IntensitySpec};
use mecke_core::mecke::Identity;
use mecke_core::scalar::parse_rational;
use mecke_core::{Error, Rational, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Poisson,
    Gamma,
    GammaLevy,
    Df,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Sample,
    Moments,
    Verify,
    Fixedpoint,
    Suite,
}

/// Every field is optional; command-line flags override it field by field.
///
/// ```json
/// {"command": "sample", "kind": "df", "sigmaSpec": {"beta": 1.0, "density": "uniform"},
///  "samples": 10, "seed": 42, "outputPath": "df.csv", "format": "csv"}
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<CommandName>,
    pub sigma_spec: Option<IntensitySpec<f64>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    #[serde(alias = "out")]
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub kind: Option<SampleKind>,
    pub beta: Option<f64>,
    pub density: Option<String>,
    pub alpha: Option<String>,
    pub s: Option<String>,
    pub levy_cutoff: Option<f64>,
    pub max_order: Option<usize>,
    pub resolution: Option<usize>,
    pub identity: Option<Vec<Identity>>,
    pub initial_law: Option<String>,
    pub iterates: Option<usize>,
    #[serde(alias = "ensemble")]
    pub ensemble_size: Option<usize>,
    pub partition: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", path.display())))
    }

    pub fn initial_law(&self) -> Result<Option<InitialLaw>> {
        self.initial_law.as_deref().map(str::parse).transpose()
    }
}

fn split(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim)
}

pub fn parse_reals(list: &str) -> Result<Vec<f64>> {
    split(list)
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::InvalidParameter(format!("{t:?} is not a finite number")))
        })
        .collect()
}

pub fn parse_rationals(list: &str) -> Result<Vec<Rational>> {
    split(list)
        .map(|t| {
            parse_rational(t)
                .ok_or_else(|| Error::InvalidParameter(format!("{t:?} is not a rational")))
        })
        .collect()
}

#[derive(Deserialize)]
struct TableRow {
    lower: f64,
    upper: f64,
    density: f64,
}

/// `uniform` or `table:<path>`.
pub fn parse_density(spec: &str) -> Result<DensitySpec<f64>> {
    if spec == "uniform" {
        return Ok(DensitySpec::Uniform);
    }
    let Some(path) = spec.strip_prefix("table:") else {
        return Err(Error::InvalidParameter(format!(
            "unknown density {spec:?}; expected uniform or table:<path>"
        )));
    };
    let bad = |e: csv::Error| Error::InvalidParameter(format!("density table {path}: {e}"));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(bad)?;
    let rows: Vec<TableRow> = reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(bad)?;
    let Some(first) = rows.first() else {
        return Err(Error::InvalidParameter(format!(
            "density table {path} is empty"
        )));
    };
    let mut breakpoints = vec![first.lower];
    let mut values = Vec::with_capacity(rows.len());
    for r in &rows {
        if r.lower != *breakpoints.last().unwrap() {
            return Err(Error::InvalidParameter(format!(
                "density table {path}: row starting at {} does not continue from {}",
                r.lower,
                breakpoints.last().unwrap()
            )));
        }
        breakpoints.push(r.upper);
        values.push(r.density);
    }
    // Rescale so the table need not be normalized by hand.
    let sigma = IntensityMeasure::piecewise_normalized(1.0, breakpoints, values)?;
    Ok(sigma.density_spec().clone())
}

/// `σ` from `--beta`/`--density`, falling back to the file's `beta`,
/// `density` and `sigmaSpec`, then to `default_beta` on the uniform density.
pub fn resolve_sigma(
    beta: Option<f64>,
    density: Option<&str>,
    file: &FileConfig,
    default_beta: f64,
) -> Result<IntensityMeasure<f64>> {
    let spec = file.sigma_spec.as_ref();
    let density = match density.or(file.density.as_deref()) {
        Some(d) => parse_density(d)?,
        None => spec
            .map(|s| s.density.clone())
            .unwrap_or(DensitySpec::Uniform),
    };
    let beta = beta
        .or(file.beta)
        .or(spec.map(|s| s.beta))
        .unwrap_or(default_beta);
    IntensityMeasure::new(beta, density)
}
