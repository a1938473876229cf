use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{normalize_log_weights, resample_into, ParticleSystem, ResamplingScheme};
use crate::error::{Error, Result};
use crate::model::{normal_logpdf, Lgss, LgssParams, StateSpaceModel};

/// Mixture proposal `Σ_j ν_{t-1}^j r(x_t | x_{t-1}^j, y_t)` for the auxiliary
/// particle filter.
pub trait Proposal<M: StateSpaceModel> {
    /// Unnormalised `log ν_{t-1}^j` given the previous particles and their
    /// normalised weights.
    #[allow(clippy::too_many_arguments)]
    fn log_mixture_weights(
        &self,
        model: &M,
        params: &M::Params,
        prev: &[f64],
        prev_weights: &[f64],
        y: f64,
        t: usize,
        out: &mut Vec<f64>,
    );

    fn sample<R: Rng + ?Sized>(
        &self,
        model: &M,
        params: &M::Params,
        x_old: f64,
        y: f64,
        t: usize,
        rng: &mut R,
    ) -> f64;

    fn logpdf(&self, model: &M, params: &M::Params, x_new: f64, x_old: f64, y: f64, t: usize) -> f64;
}

/// `ν = w`, `r = f`: reproduces the bootstrap filter.
#[derive(Debug, Clone, Copy, Default)]
pub struct BootstrapProposal;

impl<M: StateSpaceModel> Proposal<M> for BootstrapProposal {
    fn log_mixture_weights(
        &self,
        _model: &M,
        _params: &M::Params,
        _prev: &[f64],
        prev_weights: &[f64],
        _y: f64,
        _t: usize,
        out: &mut Vec<f64>,
    ) {
        out.clear();
        out.extend(prev_weights.iter().map(|w| w.ln()));
    }

    fn sample<R: Rng + ?Sized>(&self, model: &M, params: &M::Params, x_old: f64, _y: f64, t: usize, rng: &mut R) -> f64 {
        model.sample_transition(params, x_old, t - 1, rng)
    }

    fn logpdf(&self, model: &M, params: &M::Params, x_new: f64, x_old: f64, _y: f64, t: usize) -> f64 {
        model.transition_logpdf(params, x_old, x_new, t - 1)
    }
}

/// Fully adapted proposal for the linear-Gaussian model:
/// `ν ∝ w·p(y_t | x_{t-1})` and `r = p(x_t | x_{t-1}, y_t)`, both Gaussian.
#[derive(Debug, Clone, Copy, Default)]
pub struct LgssOptimalProposal;

impl LgssOptimalProposal {
    fn posterior(p: &LgssParams, x_old: f64, y: f64) -> (f64, f64) {
        let q = 1.0 / p.theta;
        let var = 1.0 / (1.0 / q + p.c * p.c / p.r);
        (var * (p.a * x_old / q + p.c * y / p.r), var)
    }
}

impl Proposal<Lgss> for LgssOptimalProposal {
    fn log_mixture_weights(
        &self,
        _model: &Lgss,
        p: &LgssParams,
        prev: &[f64],
        prev_weights: &[f64],
        y: f64,
        _t: usize,
        out: &mut Vec<f64>,
    ) {
        let s2 = p.c * p.c / p.theta + p.r;
        out.clear();
        out.extend(
            prev.iter()
                .zip(prev_weights)
                .map(|(&x, &w)| w.ln() + normal_logpdf(y, p.c * p.a * x, s2)),
        );
    }

    fn sample<R: Rng + ?Sized>(&self, _model: &Lgss, p: &LgssParams, x_old: f64, y: f64, _t: usize, rng: &mut R) -> f64 {
        let (m, v) = Self::posterior(p, x_old, y);
        let z: f64 = StandardNormal.sample(rng);
        m + v.sqrt() * z
    }

    fn logpdf(&self, _model: &Lgss, p: &LgssParams, x_new: f64, x_old: f64, y: f64, _t: usize) -> f64 {
        let (m, v) = Self::posterior(p, x_old, y);
        normal_logpdf(x_new, m, v)
    }
}

/// Auxiliary-variable importance weight
/// `log w̄ = log w_{t-1}^a + log g(y_t|x) + log f(x|x_old) - log ν_{t-1}^a - log r(x|x_old, y_t)`.
///
/// `log_w_prev` and `log_nu_prev` refer to the same ancestor; both are
/// expected normalised for the result to be an unbiased likelihood factor.
#[allow(clippy::too_many_arguments)]
pub fn apf_log_weight<M: StateSpaceModel, P: Proposal<M>>(
    model: &M,
    params: &M::Params,
    proposal: &P,
    log_w_prev: f64,
    log_nu_prev: f64,
    x_new: f64,
    x_old: f64,
    y: f64,
    t: usize,
) -> Result<f64> {
    let log_r = proposal.logpdf(model, params, x_new, x_old, y, t);
    if log_nu_prev == f64::NEG_INFINITY || log_r == f64::NEG_INFINITY {
        return Err(Error::Numerical(format!(
            "auxiliary weight has a zero denominator at time index {t}"
        )));
    }
    Ok(log_w_prev + model.observation_logpdf(params, x_new, y, t)
        + model.transition_logpdf(params, x_old, x_new, t - 1)
        - log_nu_prev
        - log_r)
}

/// Auxiliary particle filter with mixture weights and proposal kernel from
/// `proposal`. Resamples from `ν` at every step.
pub fn auxiliary_pf<M, P, R>(
    model: &M,
    params: &M::Params,
    proposal: &P,
    y: &[f64],
    n: usize,
    scheme: ResamplingScheme,
    rng: &mut R,
) -> Result<ParticleSystem>
where
    M: StateSpaceModel,
    P: Proposal<M>,
    R: Rng + ?Sized,
{
    if n == 0 || y.is_empty() {
        return Err(Error::domain("auxiliary filter needs N >= 1 and T >= 1"));
    }
    model.validate(params)?;
    let mut ps = ParticleSystem {
        particles: Vec::with_capacity(y.len()),
        log_weights: Vec::with_capacity(y.len()),
        weights: Vec::with_capacity(y.len()),
        ancestors: Vec::with_capacity(y.len()),
        loglik: 0.0,
    };
    let x: Vec<f64> = (0..n).map(|_| model.sample_initial(params, rng)).collect();
    let mut lw = vec![0.0; n];
    model.observation_logpdf_batch(params, &x, y[0], 0, &mut lw);
    let mut w = Vec::with_capacity(n);
    ps.loglik += normalize_log_weights(&lw, &mut w, 0)?;
    ps.particles.push(x);
    ps.log_weights.push(lw);
    ps.weights.push(w);
    ps.ancestors.push(Vec::new());

    let mut log_nu = Vec::with_capacity(n);
    let mut nu = Vec::with_capacity(n);
    let mut cum = Vec::with_capacity(n);
    for t in 1..y.len() {
        let prev = &ps.particles[t - 1];
        let prev_w = &ps.weights[t - 1];
        proposal.log_mixture_weights(model, params, prev, prev_w, y[t], t, &mut log_nu);
        normalize_log_weights(&log_nu, &mut nu, t)?;
        let mut anc = Vec::with_capacity(n);
        resample_into(&nu, n, scheme, rng, &mut cum, &mut anc);
        let mut x = Vec::with_capacity(n);
        let mut lw = Vec::with_capacity(n);
        for &a in &anc {
            let xn = proposal.sample(model, params, prev[a], y[t], t, rng);
            let l = apf_log_weight(model, params, proposal, prev_w[a].ln(), nu[a].ln(), xn, prev[a], y[t], t)?;
            x.push(xn);
            lw.push(l);
        }
        let mut w = Vec::with_capacity(n);
        ps.loglik += normalize_log_weights(&lw, &mut w, t)?;
        ps.particles.push(x);
        ps.log_weights.push(lw);
        ps.weights.push(w);
        ps.ancestors.push(anc);
    }
    Ok(ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::simulate;
    use crate::rng::seeded;

    #[test]
    fn bootstrap_choice_reduces_to_observation_density() {
        let model = Lgss::default();
        let p = LgssParams::new(1.3);
        let (lw, lnu) = (0.2f64.ln(), 0.2f64.ln());
        let v = apf_log_weight(&model, &p, &BootstrapProposal, lw, lnu, 0.4, -0.1, 0.3, 3).unwrap();
        let g = model.observation_logpdf(&p, 0.4, 0.3, 3);
        assert!((v - g).abs() < 1e-12);
    }

    /// Proposal whose density equals `g·f`, so every factor of the weight cancels.
    struct Matched;

    impl Proposal<Lgss> for Matched {
        fn log_mixture_weights(&self, _: &Lgss, _: &LgssParams, _: &[f64], w: &[f64], _: f64, _: usize, out: &mut Vec<f64>) {
            out.clear();
            out.extend(w.iter().map(|v| v.ln()));
        }
        fn sample<R: Rng + ?Sized>(&self, _: &Lgss, _: &LgssParams, x: f64, _: f64, _: usize, _: &mut R) -> f64 {
            x
        }
        fn logpdf(&self, m: &Lgss, p: &LgssParams, x_new: f64, x_old: f64, y: f64, t: usize) -> f64 {
            m.observation_logpdf(p, x_new, y, t) + m.transition_logpdf(p, x_old, x_new, t - 1)
        }
    }

    #[test]
    fn unit_factors_give_unit_weight() {
        let model = Lgss::default();
        let p = LgssParams::new(1.0);
        let lw = 0.25f64.ln();
        let v = apf_log_weight(&model, &p, &Matched, lw, lw, 0.1, 0.2, 0.0, 1).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let model = Lgss::default();
        let p = LgssParams::new(1.0);
        let r = apf_log_weight(&model, &p, &BootstrapProposal, 0.0, f64::NEG_INFINITY, 0.0, 0.0, 0.0, 1);
        assert!(matches!(r, Err(Error::Numerical(_))));
    }

    #[test]
    fn bootstrap_proposal_matches_bootstrap_filter_weights() {
        let p = LgssParams::new(1.0);
        let y = simulate(&Lgss::default(), &p, 20, &mut seeded(1)).unwrap().1;
        let ps = auxiliary_pf(&Lgss::default(), &p, &BootstrapProposal, &y, 30, ResamplingScheme::Multinomial, &mut seeded(2)).unwrap();
        for t in 0..y.len() {
            for i in 0..30 {
                let g = Lgss::default().observation_logpdf(&p, ps.particles[t][i], y[t], t);
                assert!((ps.log_weights[t][i] - g).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fully_adapted_weights_are_flat() {
        let p = LgssParams::new(1.0);
        let y = simulate(&Lgss::default(), &p, 20, &mut seeded(3)).unwrap().1;
        let ps = auxiliary_pf(&Lgss::default(), &p, &LgssOptimalProposal, &y, 30, ResamplingScheme::Multinomial, &mut seeded(4)).unwrap();
        for w in &ps.weights[1..] {
            assert!(w.iter().all(|&wi| (wi - 1.0 / 30.0).abs() < 1e-9));
        }
    }
}
