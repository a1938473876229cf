use rand::Rng;

use super::{normalize_log_weights, resample_into, sample_log_weights, trace_genealogy, ParticleSystem, ResamplingScheme};
use crate::error::{Error, Result};
use crate::model::StateSpaceModel;

#[derive(Debug, Clone, PartialEq)]
pub struct PgasOutput {
    /// The sampled trajectory `x*_{1:T}`.
    pub trajectory: Vec<f64>,
    /// The conditional particle system; the reference sits at index `N - 1`.
    pub system: ParticleSystem,
}

impl PgasOutput {
    /// Ancestral paths of the final particles with their normalised weights.
    pub fn weighted_paths(&self) -> (Vec<Vec<f64>>, &[f64]) {
        (trace_genealogy(&self.system), self.system.weights.last().map_or(&[][..], |w| w))
    }
}

/// Particle Gibbs with ancestor sampling, built on the bootstrap filter.
///
/// Particles `0..N-1` follow the bootstrap dynamics with multinomial
/// resampling; particle `N - 1` is pinned to `reference` and its ancestor is
/// drawn with probability `∝ w_{t-1}^j f_θ(x'_t | x_{t-1}^j)`. The returned
/// trajectory is drawn by `P(k = i) ∝ w̄_T^i`.
pub fn pgas_kernel<M, R>(
    model: &M,
    params: &M::Params,
    y: &[f64],
    n: usize,
    reference: &[f64],
    rng: &mut R,
) -> Result<PgasOutput>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let len = y.len();
    if len == 0 {
        return Err(Error::domain("PGAS kernel needs T >= 1"));
    }
    if n < 2 {
        return Err(Error::domain("PGAS kernel needs N >= 2"));
    }
    if reference.len() != len {
        return Err(Error::domain(format!(
            "reference trajectory has length {}, expected {len}",
            reference.len()
        )));
    }
    model.validate(params)?;
    let last = n - 1;
    let mut ps = ParticleSystem {
        particles: Vec::with_capacity(len),
        log_weights: Vec::with_capacity(len),
        weights: Vec::with_capacity(len),
        ancestors: Vec::with_capacity(len),
        loglik: 0.0,
    };

    let mut x: Vec<f64> = (0..last).map(|_| model.sample_initial(params, rng)).collect();
    x.push(reference[0]);
    let mut lw = vec![0.0; n];
    model.observation_logpdf_batch(params, &x, y[0], 0, &mut lw);
    let mut w = Vec::with_capacity(n);
    ps.loglik += normalize_log_weights(&lw, &mut w, 0)?;
    ps.particles.push(x);
    ps.log_weights.push(lw);
    ps.weights.push(w);
    ps.ancestors.push(Vec::new());

    let mut cum = Vec::with_capacity(n);
    let mut as_w = vec![0.0; n];
    for t in 1..len {
        let prev_x = &ps.particles[t - 1];
        let prev_w = &ps.weights[t - 1];
        let mut anc = Vec::with_capacity(n);
        resample_into(prev_w, last, ResamplingScheme::Multinomial, rng, &mut cum, &mut anc);
        for (j, s) in as_w.iter_mut().enumerate() {
            *s = prev_w[j].ln() + model.transition_logpdf(params, prev_x[j], reference[t], t - 1);
        }
        anc.push(sample_log_weights(&as_w, rng, t)?);
        let mut x: Vec<f64> = anc[..last]
            .iter()
            .map(|&a| model.sample_transition(params, prev_x[a], t - 1, rng))
            .collect();
        x.push(reference[t]);
        let mut lw = vec![0.0; n];
        model.observation_logpdf_batch(params, &x, y[t], t, &mut lw);
        let mut w = Vec::with_capacity(n);
        ps.loglik += normalize_log_weights(&lw, &mut w, t)?;
        ps.particles.push(x);
        ps.log_weights.push(lw);
        ps.weights.push(w);
        ps.ancestors.push(anc);
    }

    let k = sample_log_weights(&ps.log_weights[len - 1], rng, len - 1)?;
    let mut trajectory = vec![0.0; len];
    let mut idx = k;
    trajectory[len - 1] = ps.particles[len - 1][idx];
    for t in (1..len).rev() {
        idx = ps.ancestors[t][idx];
        trajectory[t - 1] = ps.particles[t - 1][idx];
    }
    Ok(PgasOutput { trajectory, system: ps })
}
