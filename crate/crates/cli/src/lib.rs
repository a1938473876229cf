//! Configuration-driven experiment runner for `smc-sysid`.
//!
//! A run reads an [`ExperimentConfig`] (TOML), loads or simulates a
//! dataset, executes one algorithm and writes its outputs to a directory:
//!
//! | file | written by | columns |
//! |------|------------|---------|
//! | `chain.csv` (`chain_<r>.csv` with several chains) | MCMC | `m, params..., loglik, accepted` |
//! | `iterates.csv` | optimisation | `k, params..., objective, step` |
//! | `hist_<param>.csv` | MCMC | `bin_left, bin_right, count` |
//! | `trace.csv`, `filter.csv` | `pf-only` | `t, i, x, logw, a` / `t, mean, var, ess` |
//! | `smoothed.csv` | `smooth-only` | `t, mean, var` |
//! | `summary.json`, `config.toml` | all | |
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

pub use config::{AlgorithmConfig, DataConfig, ExperimentConfig, ModelConfig, OutputConfig};
pub use run::{chain_diagnostics, run_experiment, simulate_to, RunOptions, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Rejected before any computation; nothing has been written.
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{context}: {source}")]
    Run {
        context: String,
        #[source]
        source: smc_sysid::Error,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status: 2 for validation errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            _ => 1,
        }
    }
}
