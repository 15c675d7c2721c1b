use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Arity, IntensityMeasure, TestFunctional};
use crate::rng::RngStream;
use crate::samplers::StickBreakingConfig;

/// Fewest samples a case may use.
pub const MIN_SAMPLES: usize = 1000;

/// The seven Mecke-type identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `E Σ_x F(γ, x) = β E[F(γ + δ_x, x)]`, `x ~ σ̄`.
    PoissonMecke,
    /// `E Σ_j s_j F(ν, x_j) = β E[F(ν + s δ_x, x)]`, `s ~ Exp(1)`.
    GammaMecke,
    /// `E[η(X) G(η)] = E[G((1 − t)η + t δ_x)]`.
    #[serde(rename = "df_mecke_g")]
    DfMeckeG,
    /// `E Σ_j w_j F(η, x_j) = E[F((1 − t)η + t δ_x, x)]`.
    #[serde(rename = "df_mecke_f")]
    DfMeckeF,
    /// `E Σ_j w_j R(η, x_j, w_j) = E[R((1 − t)η + t δ_x, x, t)]`.
    #[serde(rename = "df_mecke_r")]
    DfMeckeR,
    /// `E[|y| g(y)] = E[g((1 − t)y + t e_i)]`, `i ~ α/|α|`.
    #[serde(rename = "dirichlet_finite_dim_g")]
    FiniteDimG,
    /// `E[Σ_i y_i f(y, i)] = E[f((1 − t)y + t e_i, i)]`.
    #[serde(rename = "dirichlet_finite_dim_f")]
    FiniteDimF,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::PoissonMecke,
        Identity::GammaMecke,
        Identity::DfMeckeG,
        Identity::DfMeckeF,
        Identity::DfMeckeR,
        Identity::FiniteDimG,
        Identity::FiniteDimF,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Identity::PoissonMecke => "poisson_mecke",
            Identity::GammaMecke => "gamma_mecke",
            Identity::DfMeckeG => "df_mecke_g",
            Identity::DfMeckeF => "df_mecke_f",
            Identity::DfMeckeR => "df_mecke_r",
            Identity::FiniteDimG => "dirichlet_finite_dim_g",
            Identity::FiniteDimF => "dirichlet_finite_dim_f",
        }
    }

    /// Arity of the functionals the identity is stated for.
    pub fn arity(&self) -> Arity {
        match self {
            Identity::DfMeckeG | Identity::FiniteDimG => Arity::G,
            Identity::DfMeckeR => Arity::R,
            _ => Arity::F,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown identity {s:?}")))
    }
}

/// How the right-hand sides draw `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsSampling {
    /// `t ~ Beta(1, β)`.
    #[default]
    Beta,
    /// `t ~ Uniform(0, 1)` with weight `β (1 − t)^{β − 1}`. Has infinite
    /// variance for `β < 1/2`.
    UniformReweighted,
}

/// One identity, intensity and functional, with its sampling budget.
#[derive(Clone, Debug)]
pub struct IdentityCase {
    pub(crate) identity: Identity,
    pub(crate) sigma: IntensityMeasure<f64>,
    pub(crate) functional: TestFunctional<f64>,
    pub(crate) sample_count: usize,
    pub(crate) rng: RngStream,
    pub(crate) stick_breaking: StickBreakingConfig<f64>,
    pub(crate) rhs_sampling: RhsSampling,
    /// `ev_𝔛(σ)` on the functional's partition.
    pub(crate) alpha: Vec<f64>,
}

impl IdentityCase {
    pub fn new(
        identity: Identity,
        sigma: IntensityMeasure<f64>,
        functional: TestFunctional<f64>,
        sample_count: usize,
        rng: RngStream,
    ) -> Result<Self> {
        if sample_count < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "sample count {sample_count} is below {MIN_SAMPLES}"
            )));
        }
        if functional.arity() != identity.arity() {
            return Err(Error::InvalidFunctional(format!(
                "{identity} needs arity {:?}, functional {:?} has {:?}",
                identity.arity(),
                functional.id(),
                functional.arity()
            )));
        }
        functional.partition().validate_for(&sigma)?;
        let alpha = functional.partition().sigma_masses(&sigma);
        if matches!(identity, Identity::FiniteDimG | Identity::FiniteDimF)
            && alpha.iter().any(|&a| a <= 0.0)
        {
            return Err(Error::InvalidPartition(
                "every cell needs positive σ-mass".into(),
            ));
        }
        Ok(Self {
            identity,
            sigma,
            functional,
            sample_count,
            rng,
            stick_breaking: StickBreakingConfig::default(),
            rhs_sampling: RhsSampling::default(),
            alpha,
        })
    }

    pub fn with_rhs_sampling(mut self, sampling: RhsSampling) -> Self {
        self.rhs_sampling = sampling;
        self
    }

    pub fn with_stick_breaking(mut self, cfg: StickBreakingConfig<f64>) -> Self {
        self.stick_breaking = cfg;
        self
    }

    pub fn with_rng(mut self, rng: RngStream) -> Self {
        self.rng = rng;
        self
    }

    pub fn identity(&self) -> Identity {
        self.identity
    }

    pub fn sigma(&self) -> &IntensityMeasure<f64> {
        &self.sigma
    }

    pub fn functional(&self) -> &TestFunctional<f64> {
        &self.functional
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn rng(&self) -> &RngStream {
        &self.rng
    }

    pub fn rhs_sampling(&self) -> RhsSampling {
        self.rhs_sampling
    }

    /// Dirichlet parameter of the finite-dimensional identities.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}
