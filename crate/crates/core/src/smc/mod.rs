//! Sequential Monte Carlo: particle filters, smoothers and the PGAS kernel.
//!
//! Weights are kept in the log domain and normalised by max-subtraction, so
//! observation densities far below `f64::MIN_POSITIVE` are handled. A step
//! whose weights are all zero is a hard [`Error::Degenerate`](crate::Error::Degenerate)
//! rather than a silent reset.

mod apf;
mod ffbsi;
mod pf;
mod pgas;
mod resample;

use rand::Rng;

use crate::error::{Error, Result};

pub use apf::{apf_log_weight, auxiliary_pf, BootstrapProposal, LgssOptimalProposal, Proposal};
pub use ffbsi::{ffbsi, BackwardMode};
pub use pf::{
    bootstrap_loglik, bootstrap_pf, estimate_loglik, filter_expectation, trace_genealogy, PfConfig,
    ParticleSystem,
};
pub use pgas::{pgas_kernel, PgasOutput};
pub use resample::{resample, ResamplingScheme};

pub(crate) use resample::resample_into;

/// Normalises log-weights in place into `out`; returns `log(mean(exp(lw)))`.
pub(crate) fn normalize_log_weights(log_w: &[f64], out: &mut Vec<f64>, t: usize) -> Result<f64> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        if max == f64::INFINITY || log_w.iter().any(|w| w.is_nan()) {
            return Err(Error::Numerical(format!("non-finite log-weight at time index {t}")));
        }
        return Err(Error::Degenerate { t });
    }
    out.clear();
    out.extend(log_w.iter().map(|&w| (w - max).exp()));
    let sum: f64 = out.iter().sum();
    for w in out.iter_mut() {
        *w /= sum;
    }
    Ok(max + sum.ln() - (log_w.len() as f64).ln())
}

/// Draws an index with probability proportional to `exp(log_w)`.
pub(crate) fn sample_log_weights<R: Rng + ?Sized>(
    log_w: &[f64],
    rng: &mut R,
    t: usize,
) -> Result<usize> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Degenerate { t });
    }
    let total: f64 = log_w.iter().map(|&w| (w - max).exp()).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &w) in log_w.iter().enumerate() {
        let p = (w - max).exp();
        if p > 0.0 {
            last_positive = j;
            acc += p;
            if u < acc {
                return Ok(j);
            }
        }
    }
    Ok(last_positive)
}
