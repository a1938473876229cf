use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EmModel, SufficientStats};
use crate::error::{Error, Result};
use crate::kalman::{kalman_filter, smooth_from_filter};
use crate::model::LgssParams;
use crate::smc::{bootstrap_pf, ffbsi, BackwardMode, PfConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmIterate {
    pub k: usize,
    pub params: Vec<f64>,
    /// Exact log-likelihood for [`em_lgss`]; particle estimate for [`psem`].
    pub loglik: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmResult<P> {
    pub estimate: P,
    pub history: Vec<EmIterate>,
    pub converged: bool,
}

/// Exact EM for the linear-Gaussian model: E-step from the RTS smoother,
/// closed-form M-step for `θ`. Stops after `max_iter` iterations or when
/// `|θ_k - θ_{k-1}| < tol`.
pub fn em_lgss(start: &LgssParams, y: &[f64], max_iter: usize, tol: f64) -> Result<EmResult<LgssParams>> {
    if y.len() < 2 {
        return Err(Error::domain("EM needs T >= 2"));
    }
    let mut p = *start;
    let mut run = kalman_filter(&p, y)?;
    let mut history = vec![EmIterate { k: 0, params: vec![p.theta], loglik: run.loglik }];
    let mut converged = false;
    for k in 1..=max_iter {
        let stats = SufficientStats::from_smoother(&smooth_from_filter(&p, &run)?)?;
        let next = p.with_theta(stats.maximize_precision(p.a, y.len())?);
        let delta = (next.theta - p.theta).abs();
        p = next;
        run = kalman_filter(&p, y)?;
        history.push(EmIterate { k, params: vec![p.theta], loglik: run.loglik });
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(EmResult { estimate: p, history, converged })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsemConfig {
    /// Forward particles.
    pub n: usize,
    /// Backward trajectories.
    pub m: usize,
    pub max_iter: usize,
    #[serde(default)]
    pub mode: BackwardMode,
    #[serde(default)]
    pub pf: PfConfig,
}

/// Particle-smoother EM: at each iteration a fresh bootstrap filter and
/// FFBSi pass at `θ_{k-1}` give the trajectories whose statistics feed the
/// M-step. Each recorded log-likelihood is the filter estimate at that
/// iterate, so the E-step runs once more after the last update.
pub fn psem<M, R>(model: &M, start: &M::Params, y: &[f64], config: &PsemConfig, rng: &mut R) -> Result<EmResult<M::Params>>
where
    M: EmModel,
    R: Rng + ?Sized,
{
    if config.n == 0 || config.m == 0 {
        return Err(Error::Config("psem needs n >= 1 and m >= 1".into()));
    }
    psem_with(model, start, y, config.max_iter, |p| {
        let ps = bootstrap_pf(model, p, y, config.n, config.pf, rng)?;
        let trajs = ffbsi(model, p, &ps, config.m, config.mode, rng)?;
        Ok((trajs, ps.loglik))
    })
}

/// EM with a caller-supplied E-step: `draw(θ)` returns equally weighted
/// smoothed trajectories and a log-likelihood value to record.
pub fn psem_with<M, F>(model: &M, start: &M::Params, y: &[f64], max_iter: usize, mut draw: F) -> Result<EmResult<M::Params>>
where
    M: EmModel,
    F: FnMut(&M::Params) -> Result<(Vec<Vec<f64>>, f64)>,
{
    if y.len() < 2 {
        return Err(Error::domain("EM needs T >= 2"));
    }
    model.validate(start)?;
    let mut p = start.clone();
    let mut history = Vec::with_capacity(max_iter + 1);
    for k in 0..=max_iter {
        let (trajs, loglik) = draw(&p)?;
        history.push(EmIterate { k, params: model.param_vector(&p), loglik });
        if k == max_iter {
            break;
        }
        let stats = SufficientStats::from_weighted(&trajs, None)?;
        p = model.m_step(&p, &stats, y.len())?;
    }
    Ok(EmResult { estimate: p, history, converged: false })
}
