use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{sample_varve_conditional, ParameterChain};
use crate::error::{Error, Result};
use crate::kalman::{backward_sample, kalman_filter};
use crate::model::{Lgss, LgssParams, StateSpaceModel, Varve, VarveParams};
use crate::smc::{bootstrap_pf, pgas_kernel, trace_genealogy, PfConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsOutput {
    pub chain: ParameterChain,
    /// State trajectory drawn in each iteration, when requested.
    pub trajectories: Option<Vec<Vec<f64>>>,
}

/// Shape and rate of `θ | x_{1:T}` for the linear-Gaussian model:
/// `Gam(α₀ + T/2, β₀ + ½((1-a²)x₁² + Σ(x_{t+1} - a·x_t)²))`.
pub fn lgss_precision_conditional(model: &Lgss, params: &LgssParams, x: &[f64]) -> (f64, f64) {
    let shape = model.prior_shape + x.len() as f64 / 2.0;
    let mut ss = x.first().map_or(0.0, |x0| (1.0 - params.a * params.a) * x0 * x0);
    ss += x.windows(2).map(|w| (w[1] - params.a * w[0]).powi(2)).sum::<f64>();
    (shape, model.prior_rate + 0.5 * ss)
}

fn draw_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Numerical(e.to_string()))?;
    // Small shapes can underflow to zero.
    Ok(g.sample(rng).max(f64::MIN_POSITIVE))
}

/// Models whose parameter block has an exact conditional given the states.
pub trait ConjugateModel: StateSpaceModel {
    fn sample_conditional<R: Rng + ?Sized>(&self, base: &Self::Params, x: &[f64], rng: &mut R) -> Result<Self::Params>;
}

impl ConjugateModel for Lgss {
    fn sample_conditional<R: Rng + ?Sized>(&self, base: &LgssParams, x: &[f64], rng: &mut R) -> Result<LgssParams> {
        let (shape, rate) = lgss_precision_conditional(self, base, x);
        Ok(base.with_theta(draw_gamma(shape, rate, rng)?))
    }
}

impl ConjugateModel for Varve {
    fn sample_conditional<R: Rng + ?Sized>(&self, _base: &VarveParams, x: &[f64], rng: &mut R) -> Result<VarveParams> {
        sample_varve_conditional(x, self.tau_prior_shape, self.tau_prior_rate, rng)
    }
}

/// Conjugate Gibbs for the linear-Gaussian model: exact backward simulation
/// of the states, then `θ` from its Gamma conditional. The log-likelihood
/// column holds the exact `V(θ[m])`.
pub fn gibbs_lgss<R: Rng + ?Sized>(
    model: &Lgss,
    start: &LgssParams,
    y: &[f64],
    iterations: usize,
    burn_in: usize,
    keep_trajectories: bool,
    rng: &mut R,
) -> Result<GibbsOutput> {
    let mut p = *start;
    let mut chain = ParameterChain::new(model.param_names(), burn_in);
    let mut trajectories = keep_trajectories.then(Vec::new);
    let mut run = kalman_filter(&p, y)?;
    chain.push(vec![p.theta], run.loglik, true, vec![p.theta]);
    for _ in 0..iterations {
        let x = backward_sample(&p, &run, rng);
        p = model.sample_conditional(&p, &x, rng)?;
        run = kalman_filter(&p, y)?;
        chain.push(vec![p.theta], run.loglik, true, vec![p.theta]);
        if let Some(t) = trajectories.as_mut() {
            t.push(x);
        }
    }
    Ok(GibbsOutput { chain, trajectories })
}

/// PGAS-within-Gibbs: the state block is one application of the PGAS
/// kernel conditioned on the previous trajectory, followed by an exact
/// draw of the parameters. Without `initial_states`, the first reference
/// is a path drawn from a bootstrap filter run at `start`. The
/// log-likelihood column holds the conditional filter's estimate (row 0:
/// an unconditional filter at `start`), a diagnostic rather than an
/// unbiased likelihood.
#[allow(clippy::too_many_arguments)]
pub fn pgas_gibbs<M, R>(
    model: &M,
    start: &M::Params,
    y: &[f64],
    initial_states: Option<Vec<f64>>,
    n: usize,
    iterations: usize,
    burn_in: usize,
    keep_trajectories: bool,
    rng: &mut R,
) -> Result<GibbsOutput>
where
    M: ConjugateModel,
    R: Rng + ?Sized,
{
    if n < 2 {
        return Err(Error::Config("pgas-gibbs needs n >= 2".into()));
    }
    model.validate(start)?;
    let (mut x, loglik0) = match initial_states {
        Some(x) => {
            let ll = crate::smc::bootstrap_loglik(model, start, y, n, PfConfig::default(), rng)?;
            (x, ll)
        }
        None => {
            let ps = bootstrap_pf(model, start, y, n, PfConfig::default(), rng)?;
            let k = crate::smc::sample_log_weights(&ps.log_weights[y.len() - 1], rng, y.len() - 1)?;
            (trace_genealogy(&ps).swap_remove(k), ps.loglik)
        }
    };
    let mut p = start.clone();
    let mut chain = ParameterChain::new(model.param_names(), burn_in);
    let v0 = model.param_vector(&p);
    chain.push(v0.clone(), loglik0, true, v0);
    let mut trajectories = keep_trajectories.then(Vec::new);
    for _ in 0..iterations {
        let out = pgas_kernel(model, &p, y, n, &x, rng)?;
        x = out.trajectory;
        p = model.sample_conditional(&p, &x, rng)?;
        let v = model.param_vector(&p);
        chain.push(v.clone(), out.system.loglik, true, v);
        if let Some(t) = trajectories.as_mut() {
            t.push(x.clone());
        }
    }
    Ok(GibbsOutput { chain, trajectories })
}
