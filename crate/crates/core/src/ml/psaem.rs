use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EmModel, SufficientStats};
use crate::error::{Error, Result};
use crate::smc::{bootstrap_pf, pgas_kernel, sample_log_weights, trace_genealogy, PfConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsaemConfig {
    /// Particles in the PGAS kernel, `N >= 2`.
    pub n: usize,
    pub max_iter: usize,
    /// Step sequence `α_k = k^{-step_exponent}`. Exponents in `(0.5, 1]`
    /// satisfy `Σα = ∞, Σα² < ∞`; `0` gives `α ≡ 1` (Monte Carlo EM).
    #[serde(default = "default_exponent")]
    pub step_exponent: f64,
}

fn default_exponent() -> f64 {
    0.7
}

impl PsaemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config("psaem needs n >= 2".into()));
        }
        let e = self.step_exponent;
        if !(e == 0.0 || (e > 0.5 && e <= 1.0)) {
            return Err(Error::Config(format!("step_exponent must be 0 or in (0.5, 1], got {e}")));
        }
        Ok(())
    }

    pub fn step(&self, k: usize) -> f64 {
        (k as f64).powf(-self.step_exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsaemIterate {
    pub k: usize,
    pub params: Vec<f64>,
    pub step: f64,
    /// Log-likelihood estimate of the conditional filter that produced
    /// this iterate (row 0: the unconditional start-up filter).
    pub loglik: f64,
    /// Accumulated `Ŝ_k`.
    pub stats: SufficientStats,
    /// Statistics of this iteration's weighted paths.
    pub sample: SufficientStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsaemResult<P> {
    pub estimate: P,
    pub history: Vec<PsaemIterate>,
}

/// Particle SAEM: the PGAS kernel conditioned on the previous trajectory
/// supplies weighted paths, whose statistics update
/// `Ŝ_k = (1 - α_k)Ŝ_{k-1} + α_k Σ_i w_T^i S(x^i_{1:T})`, followed by the
/// M-step on `Ŝ_k`. The initial reference is one path of a bootstrap
/// filter run at `start`.
pub fn psaem<M, R>(model: &M, start: &M::Params, y: &[f64], config: &PsaemConfig, rng: &mut R) -> Result<PsaemResult<M::Params>>
where
    M: EmModel,
    R: Rng + ?Sized,
{
    config.validate()?;
    if y.len() < 2 {
        return Err(Error::domain("psaem needs T >= 2"));
    }
    model.validate(start)?;
    let ps = bootstrap_pf(model, start, y, config.n, PfConfig::default(), rng)?;
    let k0 = sample_log_weights(&ps.log_weights[y.len() - 1], rng, y.len() - 1)?;
    let mut reference = trace_genealogy(&ps).swap_remove(k0);

    let mut p = start.clone();
    let mut stats = SufficientStats::from_trajectory(&reference)?;
    let mut history = Vec::with_capacity(config.max_iter + 1);
    history.push(PsaemIterate { k: 0, params: model.param_vector(&p), step: 0.0, loglik: ps.loglik, stats, sample: stats });
    for k in 1..=config.max_iter {
        let out = pgas_kernel(model, &p, y, config.n, &reference, rng)?;
        let (paths, w) = out.weighted_paths();
        let fresh = SufficientStats::from_weighted(&paths, Some(w))?;
        let alpha = config.step(k);
        stats = stats.blend(&fresh, alpha);
        p = model.m_step(&p, &stats, y.len())?;
        reference = out.trajectory;
        history.push(PsaemIterate { k, params: model.param_vector(&p), step: alpha, loglik: out.system.loglik, stats, sample: fresh });
    }
    Ok(PsaemResult { estimate: p, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate, Lgss, LgssParams};
    use crate::rng::seeded;

    #[test]
    fn config_checks() {
        assert!(PsaemConfig { n: 1, max_iter: 1, step_exponent: 0.7 }.validate().is_err());
        assert!(PsaemConfig { n: 2, max_iter: 1, step_exponent: 0.4 }.validate().is_err());
        assert!(PsaemConfig { n: 2, max_iter: 1, step_exponent: 0.0 }.validate().is_ok());
        assert_eq!(PsaemConfig { n: 2, max_iter: 1, step_exponent: 0.0 }.step(7), 1.0);
    }

    #[test]
    fn statistics_move_by_convex_steps() {
        let y = simulate(&Lgss::default(), &LgssParams::new(1.0), 50, &mut seeded(1)).unwrap().1;
        let cfg = PsaemConfig { n: 5, max_iter: 30, step_exponent: 0.7 };
        let r = psaem(&Lgss::default(), &LgssParams::new(2.0), &y, &cfg, &mut seeded(2)).unwrap();
        assert_eq!(r.history.len(), 31);
        assert_eq!(r.history[1].step, 1.0);
        for w in r.history.windows(2) {
            let (prev, b, fresh) = (w[0].stats, w[1].stats, w[1].sample);
            for (p, n, f) in [(prev.psi, b.psi, fresh.psi), (prev.phi, b.phi, fresh.phi), (prev.sigma, b.sigma, fresh.sigma), (prev.x, b.x, fresh.x)] {
                assert!(n >= p.min(f) - 1e-12 && n <= p.max(f) + 1e-12);
            }
            assert!(b.sigma >= 0.0 && b.phi >= 0.0 && b.x >= 0.0);
            assert!(b.psi * b.psi <= b.phi * b.sigma + 1e-12);
            assert!(w[1].step <= 1.0 && w[1].step > 0.0);
        }
        assert!(r.estimate.theta.is_finite() && r.estimate.theta > 0.0);
    }
}
