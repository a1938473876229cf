use std::io::{self, Write};

use rand::Rng;

use super::{normalize_log_weights, resample_into, ResamplingScheme};
use crate::diagnostics::weight_ess;
use crate::error::{Error, Result};
use crate::model::StateSpaceModel;

/// Full record of a particle filter run, indexed `[t][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    pub particles: Vec<Vec<f64>>,
    /// Unnormalised log-weights `log w̄_t^i`.
    pub log_weights: Vec<Vec<f64>>,
    /// Normalised weights `w_t^i`.
    pub weights: Vec<Vec<f64>>,
    /// `ancestors[t][i]` indexes `particles[t - 1]`; empty at `t = 0`.
    pub ancestors: Vec<Vec<usize>>,
    /// `log p̂_θ(y_{1:T})`.
    pub loglik: f64,
}

impl ParticleSystem {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn num_particles(&self) -> usize {
        self.particles.first().map_or(0, Vec::len)
    }

    /// CSV dump with columns `t,i,x,logw,a`; `a` is empty at `t = 0`.
    pub fn write_trace<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,i,x,logw,a")?;
        for t in 0..self.len() {
            for i in 0..self.particles[t].len() {
                let (x, lw) = (self.particles[t][i], self.log_weights[t][i]);
                match self.ancestors[t].get(i) {
                    Some(a) => writeln!(out, "{t},{i},{x},{lw},{a}")?,
                    None => writeln!(out, "{t},{i},{x},{lw},")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfConfig {
    #[serde(default)]
    pub scheme: ResamplingScheme,
    /// Resample only when ESS < threshold·N. `None` resamples at every step.
    #[serde(default)]
    pub ess_threshold: Option<f64>,
}

impl PfConfig {
    pub fn with_scheme(scheme: ResamplingScheme) -> Self {
        PfConfig { scheme, ess_threshold: None }
    }
}

/// Bootstrap particle filter: propagate through the dynamics, weight by the
/// observation density, resample.
///
/// When a step is not resampled (adaptive mode), the carried weight enters
/// as `w̄_t^i = N·w_{t-1}^i·g_θ(y_t | x_t^i)` so that
/// `Σ_t log(N⁻¹ Σ_i w̄_t^i)` remains the likelihood estimate.
pub fn bootstrap_pf<M, R>(
    model: &M,
    params: &M::Params,
    y: &[f64],
    n: usize,
    config: PfConfig,
    rng: &mut R,
) -> Result<ParticleSystem>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    run(model, params, y, n, config, rng, true)
}

/// Likelihood estimate `log p̂_θ(y_{1:T})` without retaining the history.
pub fn bootstrap_loglik<M, R>(
    model: &M,
    params: &M::Params,
    y: &[f64],
    n: usize,
    config: PfConfig,
    rng: &mut R,
) -> Result<f64>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    Ok(run(model, params, y, n, config, rng, false)?.loglik)
}

fn run<M, R>(
    model: &M,
    params: &M::Params,
    y: &[f64],
    n: usize,
    config: PfConfig,
    rng: &mut R,
    keep_history: bool,
) -> Result<ParticleSystem>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::domain("particle filter needs N >= 1"));
    }
    if y.is_empty() {
        return Err(Error::domain("particle filter needs T >= 1"));
    }
    model.validate(params)?;
    let len = y.len();
    let cap = if keep_history { len } else { 1 };
    let mut ps = ParticleSystem {
        particles: Vec::with_capacity(cap),
        log_weights: Vec::with_capacity(cap),
        weights: Vec::with_capacity(cap),
        ancestors: Vec::with_capacity(cap),
        loglik: 0.0,
    };

    let mut x: Vec<f64> = (0..n).map(|_| model.sample_initial(params, rng)).collect();
    let mut lw = vec![0.0; n];
    model.observation_logpdf_batch(params, &x, y[0], 0, &mut lw);
    let mut w = Vec::with_capacity(n);
    ps.loglik += normalize_log_weights(&lw, &mut w, 0)?;

    let mut anc: Vec<usize> = Vec::with_capacity(n);
    let mut cum = Vec::with_capacity(n);
    let mut x_next = vec![0.0; n];
    let mut carried = vec![0.0; n];
    let ln_n = (n as f64).ln();

    if keep_history {
        ps.particles.push(x.clone());
        ps.log_weights.push(lw.clone());
        ps.weights.push(w.clone());
        ps.ancestors.push(Vec::new());
    }

    for t in 1..len {
        let do_resample = match config.ess_threshold {
            None => true,
            Some(frac) => weight_ess(&w) < frac * n as f64,
        };
        if do_resample {
            resample_into(&w, n, config.scheme, rng, &mut cum, &mut anc);
            carried.fill(0.0);
        } else {
            anc.clear();
            anc.extend(0..n);
            for (c, &wi) in carried.iter_mut().zip(&w) {
                *c = wi.ln() + ln_n;
            }
        }
        for (xn, &a) in x_next.iter_mut().zip(&anc) {
            *xn = model.sample_transition(params, x[a], t - 1, rng);
        }
        std::mem::swap(&mut x, &mut x_next);
        model.observation_logpdf_batch(params, &x, y[t], t, &mut lw);
        if !do_resample {
            for (l, &c) in lw.iter_mut().zip(&carried) {
                *l += c;
            }
        }
        ps.loglik += normalize_log_weights(&lw, &mut w, t)?;
        if keep_history {
            ps.particles.push(x.clone());
            ps.log_weights.push(lw.clone());
            ps.weights.push(w.clone());
            ps.ancestors.push(anc.clone());
        }
    }
    if !keep_history {
        ps.particles.push(x);
        ps.log_weights.push(lw);
        ps.weights.push(w);
        ps.ancestors.push(anc);
    }
    Ok(ps)
}

/// `Σ_t log(N⁻¹ Σ_i w̄_t^i)` recomputed from the stored unnormalised weights.
pub fn estimate_loglik(ps: &ParticleSystem) -> f64 {
    ps.log_weights
        .iter()
        .map(|lw| {
            let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = lw.iter().map(|&l| (l - max).exp()).sum();
            max + (s / lw.len() as f64).ln()
        })
        .sum()
}

/// `Σ_i w_t^i φ(x_t^i)`.
pub fn filter_expectation(ps: &ParticleSystem, t: usize, phi: impl Fn(f64) -> f64) -> f64 {
    ps.weights[t]
        .iter()
        .zip(&ps.particles[t])
        .map(|(&w, &x)| w * phi(x))
        .sum()
}

/// Ancestral paths of the final particles: `paths[i][t]` is the time-`t`
/// ancestor of `x_T^i`.
pub fn trace_genealogy(ps: &ParticleSystem) -> Vec<Vec<f64>> {
    let len = ps.len();
    let n = ps.num_particles();
    let mut paths = vec![vec![0.0; len]; n];
    for (i, path) in paths.iter_mut().enumerate() {
        let mut idx = i;
        path[len - 1] = ps.particles[len - 1][idx];
        for t in (1..len).rev() {
            idx = ps.ancestors[t][idx];
            path[t - 1] = ps.particles[t - 1][idx];
        }
    }
    paths
}
