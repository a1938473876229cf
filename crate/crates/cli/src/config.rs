//! Experiment configuration, read from TOML.
//!
//! ```toml
//! schema_version = 1
//! seed = 42
//!
//! [model]
//! id = "lgss"          # or "varve"
//! theta = 1.0          # starting point for estimators
//!
//! [data]
//! source = "simulate"  # or "file" / "bundled-varve"
//! length = 100
//! theta = 1.0
//!
//! [algorithm]
//! name = "em"
//! max_iter = 100
//!
//! [output]
//! histogram_bins = 40  # optional; Freedman-Diaconis when absent
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smc_sysid::bayes::WalkSpace;
use smc_sysid::model::Coordinates;
use smc_sysid::smc::{BackwardMode, ResamplingScheme};
use smc_sysid::{Lgss, LgssParams, Varve, VarveParams};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub model: ModelConfig,
    pub data: DataConfig,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Lgss {
        #[serde(default = "one")]
        theta: f64,
        #[serde(default = "default_a")]
        a: f64,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_r")]
        r: f64,
        #[serde(default = "default_prior")]
        prior_shape: f64,
        #[serde(default = "default_prior")]
        prior_rate: f64,
    },
    Varve {
        #[serde(default = "default_phi")]
        phi: f64,
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default)]
        coordinates: Coordinates,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataConfig {
    /// Draw a dataset from the model. Parameters not given fall back to the
    /// `[model]` values; the generator is `seed` when set, otherwise a stream
    /// derived from the master seed.
    Simulate {
        length: usize,
        theta: Option<f64>,
        phi: Option<f64>,
        tau: Option<f64>,
        seed: Option<u64>,
    },
    /// One observation per line; `#` starts a comment. Relative paths are
    /// resolved against the config file's directory.
    File { path: PathBuf },
    BundledVarve {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmConfig {
    /// Projected gradient ascent. The gradient is exact (Kalman) when `n` is
    /// absent, which requires the linear-Gaussian model; otherwise a particle
    /// filter with `n` particles and `m` backward trajectories.
    DoMl {
        #[serde(default = "default_step_base")]
        step_base: f64,
        #[serde(default = "default_decay")]
        decay: f64,
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "yes")]
        backtrack: bool,
        n: Option<usize>,
        m: Option<usize>,
        #[serde(default)]
        mode: BackwardMode,
    },
    Em {
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Psem {
        n: usize,
        m: usize,
        max_iter: usize,
        #[serde(default)]
        mode: BackwardMode,
    },
    Psaem {
        n: usize,
        max_iter: usize,
        #[serde(default = "default_step_exponent")]
        step_exponent: f64,
    },
    Mh {
        iterations: usize,
        burn_in: usize,
        proposal_var: f64,
    },
    /// Particle MH with a Gaussian random walk `N(ψ, scale·Σ)` in the
    /// coordinates chosen by `walk`. With `pilot_iterations > 0` a pilot chain
    /// using `proposal_cov` is run first and its sample covariance replaces Σ.
    Pmh {
        n: usize,
        iterations: usize,
        burn_in: usize,
        proposal_cov: Vec<Vec<f64>>,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        walk: WalkSpace,
        #[serde(default)]
        pilot_iterations: usize,
        #[serde(default)]
        scheme: ResamplingScheme,
    },
    Gibbs {
        iterations: usize,
        burn_in: usize,
    },
    PgasGibbs {
        n: usize,
        iterations: usize,
        burn_in: usize,
    },
    PfOnly {
        n: usize,
        #[serde(default)]
        scheme: ResamplingScheme,
        ess_threshold: Option<f64>,
    },
    /// Kalman smoother for the linear-Gaussian model; FFBSi with `n`
    /// forward particles and `m` trajectories otherwise.
    SmoothOnly {
        n: Option<usize>,
        m: Option<usize>,
        #[serde(default)]
        mode: BackwardMode,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub histogram_bins: Option<usize>,
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_a() -> f64 {
    LgssParams::default().a
}
fn default_c() -> f64 {
    LgssParams::default().c
}
fn default_r() -> f64 {
    LgssParams::default().r
}
fn default_prior() -> f64 {
    Lgss::default().prior_shape
}
fn default_phi() -> f64 {
    0.95
}
fn default_tau() -> f64 {
    10.0
}
fn default_step_base() -> f64 {
    0.01
}
fn default_decay() -> f64 {
    2.0 / 3.0
}
fn default_tol() -> f64 {
    1e-6
}
fn default_step_exponent() -> f64 {
    0.7
}

impl AlgorithmConfig {
    pub fn id(&self) -> &'static str {
        match self {
            AlgorithmConfig::DoMl { .. } => "do-ml",
            AlgorithmConfig::Em { .. } => "em",
            AlgorithmConfig::Psem { .. } => "psem",
            AlgorithmConfig::Psaem { .. } => "psaem",
            AlgorithmConfig::Mh { .. } => "mh",
            AlgorithmConfig::Pmh { .. } => "pmh",
            AlgorithmConfig::Gibbs { .. } => "gibbs",
            AlgorithmConfig::PgasGibbs { .. } => "pgas-gibbs",
            AlgorithmConfig::PfOnly { .. } => "pf-only",
            AlgorithmConfig::SmoothOnly { .. } => "smooth-only",
        }
    }

    /// Whether the algorithm produces a parameter chain.
    pub fn is_mcmc(&self) -> bool {
        matches!(
            self,
            AlgorithmConfig::Mh { .. }
                | AlgorithmConfig::Pmh { .. }
                | AlgorithmConfig::Gibbs { .. }
                | AlgorithmConfig::PgasGibbs { .. }
        )
    }
}

impl ModelConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ModelConfig::Lgss { .. } => "lgss",
            ModelConfig::Varve { .. } => "varve",
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelConfig::Lgss { .. } => &["theta"],
            ModelConfig::Varve { .. } => &["phi", "tau"],
        }
    }
}

/// A model together with its starting parameters.
#[derive(Debug, Clone)]
pub enum ModelSetup {
    Lgss(Lgss, LgssParams),
    Varve(Varve, VarveParams),
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let DataConfig::File { path: data } = &mut cfg.data {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn setup(&self) -> Result<ModelSetup, CliError> {
        let invalid = |e: smc_sysid::Error| CliError::Validation(format!("[model]: {e}"));
        match self.model {
            ModelConfig::Lgss { theta, a, c, r, prior_shape, prior_rate } => {
                let p = LgssParams { theta, a, c, r };
                p.validate().map_err(invalid)?;
                Ok(ModelSetup::Lgss(Lgss { prior_shape, prior_rate }, p))
            }
            ModelConfig::Varve { phi, tau, coordinates } => {
                let p = VarveParams::new(phi, tau);
                p.validate().map_err(invalid)?;
                Ok(ModelSetup::Varve(Varve::default().with_coordinates(coordinates), p))
            }
        }
    }

    /// Checks everything that can be checked without running: parameter
    /// ranges, completeness of the algorithm block, model compatibility.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.setup()?;
        let lgss = matches!(self.model, ModelConfig::Lgss { .. });
        let dim = self.model.param_names().len();

        match &self.data {
            DataConfig::Simulate { length, theta, phi, tau, .. } => {
                if *length == 0 {
                    return bad("[data] length must be >= 1".into());
                }
                if lgss && (phi.is_some() || tau.is_some()) {
                    return bad("[data] phi/tau apply to the varve model only".into());
                }
                if !lgss && theta.is_some() {
                    return bad("[data] theta applies to the lgss model only".into());
                }
            }
            DataConfig::File { .. } => {}
            DataConfig::BundledVarve {} => {}
        }

        let need_lgss = |what: &str| -> Result<(), CliError> {
            if lgss {
                Ok(())
            } else {
                bad(format!("algorithm `{what}` requires model `lgss`"))
            }
        };
        let positive = |name: &str, v: usize| -> Result<(), CliError> {
            if v == 0 {
                bad(format!("[algorithm] {name} must be >= 1"))
            } else {
                Ok(())
            }
        };
        let burn = |iterations: usize, burn_in: usize| -> Result<(), CliError> {
            if burn_in >= iterations {
                bad(format!("[algorithm] burn_in ({burn_in}) must be below iterations ({iterations})"))
            } else {
                Ok(())
            }
        };

        match &self.algorithm {
            AlgorithmConfig::DoMl { step_base, decay, max_iter, tol, n, m, .. } => {
                positive("max_iter", *max_iter)?;
                if !(*step_base > 0.0) || !(*decay >= 0.0) || !(*tol >= 0.0) {
                    return bad("[algorithm] needs step_base > 0, decay >= 0, tol >= 0".into());
                }
                match (n, m) {
                    (None, None) => need_lgss("do-ml with the exact gradient")?,
                    (Some(n), Some(m)) => {
                        positive("n", *n)?;
                        positive("m", *m)?;
                    }
                    _ => return bad("[algorithm] do-ml needs both n and m for a particle gradient".into()),
                }
            }
            AlgorithmConfig::Em { max_iter, .. } => {
                need_lgss("em")?;
                positive("max_iter", *max_iter)?;
            }
            AlgorithmConfig::Psem { n, m, max_iter, .. } => {
                positive("n", *n)?;
                positive("m", *m)?;
                positive("max_iter", *max_iter)?;
            }
            AlgorithmConfig::Psaem { n, max_iter, step_exponent } => {
                if *n < 2 {
                    return bad("[algorithm] psaem needs n >= 2".into());
                }
                positive("max_iter", *max_iter)?;
                if !(0.0..=1.0).contains(step_exponent) {
                    return bad("[algorithm] step_exponent must lie in [0, 1]".into());
                }
            }
            AlgorithmConfig::Mh { iterations, burn_in, proposal_var } => {
                need_lgss("mh")?;
                burn(*iterations, *burn_in)?;
                if !(*proposal_var > 0.0) {
                    return bad("[algorithm] proposal_var must be > 0".into());
                }
            }
            AlgorithmConfig::Pmh { n, iterations, burn_in, proposal_cov, scale, walk, pilot_iterations, .. } => {
                positive("n", *n)?;
                burn(*iterations, *burn_in)?;
                if proposal_cov.len() != dim || proposal_cov.iter().any(|r| r.len() != dim) {
                    return bad(format!("[algorithm] proposal_cov must be {dim}x{dim}"));
                }
                if let Err(e) = smc_sysid::bayes::RandomWalkProposal::new(proposal_cov, *scale) {
                    return bad(format!("[algorithm] proposal: {e}"));
                }
                if let WalkSpace::Reciprocal(i) = walk {
                    if *i >= dim {
                        return bad(format!("[algorithm] walk component {i} out of range"));
                    }
                }
                if *pilot_iterations == 1 {
                    return bad("[algorithm] pilot_iterations must be 0 or >= 2".into());
                }
            }
            AlgorithmConfig::Gibbs { iterations, burn_in } => {
                need_lgss("gibbs")?;
                burn(*iterations, *burn_in)?;
            }
            AlgorithmConfig::PgasGibbs { n, iterations, burn_in } => {
                if *n < 2 {
                    return bad("[algorithm] pgas-gibbs needs n >= 2".into());
                }
                burn(*iterations, *burn_in)?;
            }
            AlgorithmConfig::PfOnly { n, ess_threshold, .. } => {
                positive("n", *n)?;
                if let Some(th) = ess_threshold {
                    if !(0.0..=1.0).contains(th) {
                        return bad("[algorithm] ess_threshold must lie in [0, 1]".into());
                    }
                }
            }
            AlgorithmConfig::SmoothOnly { n, m, .. } => match (n, m) {
                (None, None) => need_lgss("smooth-only without particles")?,
                (Some(n), Some(m)) => {
                    positive("n", *n)?;
                    positive("m", *m)?;
                }
                _ => return bad("[algorithm] smooth-only needs both n and m or neither".into()),
            },
        }
        if self.output.histogram_bins == Some(0) {
            return bad("[output] histogram_bins must be >= 1".into());
        }
        Ok(())
    }
}
