use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_log_weights, ParticleSystem};
use crate::error::{Error, Result};
use crate::model::StateSpaceModel;

/// How each backward index is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackwardMode {
    /// Evaluate all `N` backward weights per step.
    Exhaustive,
    /// Propose from the filter weights and accept with `f / sup f`; after
    /// `max_attempts` rejections the step falls back to exhaustive evaluation.
    Rejection { max_attempts: usize },
}

impl Default for BackwardMode {
    fn default() -> Self {
        BackwardMode::Rejection { max_attempts: 50 }
    }
}

/// Forward-filtering backward-simulation: `m` trajectories, each returned as
/// `traj[t]`, approximately distributed as `p_θ(x_{1:T} | y_{1:T})`.
pub fn ffbsi<M, R>(
    model: &M,
    params: &M::Params,
    forward: &ParticleSystem,
    m: usize,
    mode: BackwardMode,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    let len = forward.len();
    if len == 0 || m == 0 {
        return Err(Error::domain("backward simulation needs a forward run and M >= 1"));
    }
    if len != forward.ancestors.len() || forward.particles[0].is_empty() {
        return Err(Error::domain("forward run has no stored history"));
    }
    let bound = match mode {
        BackwardMode::Exhaustive => None,
        BackwardMode::Rejection { max_attempts } => match model.transition_log_bound(params) {
            Some(b) if b.is_finite() => Some((b, max_attempts)),
            _ => {
                return Err(Error::Config(
                    "rejection backward simulation needs a finite transition density bound".into(),
                ))
            }
        },
    };

    let cumulative: Vec<Vec<f64>> = forward.weights.iter().map(|w| cumsum(w)).collect();
    let log_w: Vec<Vec<f64>> = forward.weights.iter().map(|w| w.iter().map(|v| v.ln()).collect()).collect();

    let mut out = vec![vec![0.0; len]; m];
    let mut scratch = Vec::new();
    for traj in out.iter_mut() {
        let mut j = draw(&cumulative[len - 1], rng);
        traj[len - 1] = forward.particles[len - 1][j];
        for t in (0..len - 1).rev() {
            let next = traj[t + 1];
            let xs = &forward.particles[t];
            let mut chosen = None;
            if let Some((b, cap)) = bound {
                for _ in 0..cap {
                    let k = draw(&cumulative[t], rng);
                    let log_acc = model.transition_logpdf(params, xs[k], next, t) - b;
                    if rng.random::<f64>().ln() < log_acc {
                        chosen = Some(k);
                        break;
                    }
                }
            }
            j = match chosen {
                Some(k) => k,
                None => {
                    scratch.clear();
                    scratch.extend(
                        xs.iter()
                            .zip(&log_w[t])
                            .map(|(&x, &lw)| lw + model.transition_logpdf(params, x, next, t)),
                    );
                    sample_log_weights(&scratch, rng, t)?
                }
            };
            traj[t] = xs[j];
        }
    }
    Ok(out)
}

fn cumsum(w: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    w.iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

fn draw<R: Rng + ?Sized>(cum: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * cum[cum.len() - 1];
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate, Lgss, LgssParams};
    use crate::rng::seeded;
    use crate::smc::{bootstrap_pf, PfConfig};

    fn setup(len: usize, n: usize) -> (Vec<f64>, ParticleSystem) {
        let p = LgssParams::new(1.0);
        let y = simulate(&Lgss::default(), &p, len, &mut seeded(11)).unwrap().1;
        let ps = bootstrap_pf(&Lgss::default(), &p, &y, n, PfConfig::default(), &mut seeded(12)).unwrap();
        (y, ps)
    }

    #[test]
    fn single_step_draws_from_filter_weights() {
        let (_, ps) = setup(1, 4);
        let trajs = ffbsi(&Lgss::default(), &LgssParams::new(1.0), &ps, 20000, BackwardMode::Exhaustive, &mut seeded(1)).unwrap();
        for (i, &x) in ps.particles[0].iter().enumerate() {
            let freq = trajs.iter().filter(|t| t[0] == x).count() as f64 / 20000.0;
            let w = ps.weights[0][i];
            assert!((freq - w).abs() < 4.0 * (w * (1.0 - w) / 20000.0).sqrt() + 1e-12);
        }
    }

    #[test]
    fn trajectories_are_built_from_particles() {
        let (_, ps) = setup(15, 30);
        let p = LgssParams::new(1.0);
        for mode in [BackwardMode::Exhaustive, BackwardMode::default(), BackwardMode::Rejection { max_attempts: 0 }] {
            let trajs = ffbsi(&Lgss::default(), &p, &ps, 10, mode, &mut seeded(2)).unwrap();
            for traj in &trajs {
                assert_eq!(traj.len(), 15);
                for (t, x) in traj.iter().enumerate() {
                    assert!(ps.particles[t].contains(x));
                }
            }
        }
    }

    #[test]
    fn rejection_needs_a_bound() {
        struct NoBound;
        impl StateSpaceModel for NoBound {
            type Params = LgssParams;
            fn param_names(&self) -> &'static [&'static str] {
                Lgss::default().param_names()
            }
            fn param_vector(&self, p: &LgssParams) -> Vec<f64> {
                vec![p.theta]
            }
            fn with_param_vector(&self, b: &LgssParams, v: &[f64]) -> Result<LgssParams> {
                Lgss::default().with_param_vector(b, v)
            }
            fn validate(&self, p: &LgssParams) -> Result<()> {
                p.validate()
            }
            fn sample_initial<R: Rng + ?Sized>(&self, p: &LgssParams, rng: &mut R) -> f64 {
                Lgss::default().sample_initial(p, rng)
            }
            fn initial_logpdf(&self, p: &LgssParams, x: f64) -> f64 {
                Lgss::default().initial_logpdf(p, x)
            }
            fn sample_transition<R: Rng + ?Sized>(&self, p: &LgssParams, x: f64, t: usize, rng: &mut R) -> f64 {
                Lgss::default().sample_transition(p, x, t, rng)
            }
            fn transition_logpdf(&self, p: &LgssParams, a: f64, b: f64, t: usize) -> f64 {
                Lgss::default().transition_logpdf(p, a, b, t)
            }
            fn observation_logpdf(&self, p: &LgssParams, x: f64, y: f64, t: usize) -> f64 {
                Lgss::default().observation_logpdf(p, x, y, t)
            }
            fn sample_observation<R: Rng + ?Sized>(&self, p: &LgssParams, x: f64, t: usize, rng: &mut R) -> f64 {
                Lgss::default().sample_observation(p, x, t, rng)
            }
            fn log_prior(&self, p: &LgssParams) -> f64 {
                Lgss::default().log_prior(p)
            }
        }
        let (_, ps) = setup(5, 10);
        let err = ffbsi(&NoBound, &LgssParams::new(1.0), &ps, 3, BackwardMode::default(), &mut seeded(3)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(ffbsi(&NoBound, &LgssParams::new(1.0), &ps, 3, BackwardMode::Exhaustive, &mut seeded(3)).is_ok());
    }

    #[test]
    fn zero_trajectories_rejected() {
        let (_, ps) = setup(5, 10);
        assert!(ffbsi(&Lgss::default(), &LgssParams::new(1.0), &ps, 0, BackwardMode::Exhaustive, &mut seeded(3)).is_err());
    }
}
