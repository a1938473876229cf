use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ParameterChain, RandomWalkProposal, WalkSpace};
use crate::error::{Error, Result};
use crate::kalman::kalman_filter;
use crate::model::{Lgss, LgssParams, StateSpaceModel};
use crate::smc::{bootstrap_loglik, PfConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhSettings {
    pub iterations: usize,
    pub burn_in: usize,
    #[serde(default)]
    pub walk: WalkSpace,
}

impl MhSettings {
    pub fn new(iterations: usize, burn_in: usize) -> Self {
        MhSettings { iterations, burn_in, walk: WalkSpace::Identity }
    }
}

/// Random-walk Metropolis–Hastings. The proposal is symmetric in the walk
/// coordinates, so the log acceptance ratio is
/// `ℓ(θ') + log π(θ') + log J(θ') - ℓ(θ) - log π(θ) - log J(θ)`,
/// where `J` is the Jacobian of the walk-space map. Proposals with zero
/// prior density are rejected without evaluating the likelihood; on
/// rejection the stored log-likelihood is carried over unchanged.
pub fn metropolis_hastings<R, P, L>(
    names: &[&str],
    start: &[f64],
    proposal: &RandomWalkProposal,
    settings: &MhSettings,
    log_prior: P,
    mut loglik: L,
    rng: &mut R,
) -> Result<ParameterChain>
where
    R: Rng + ?Sized,
    P: Fn(&[f64]) -> f64,
    L: FnMut(&[f64], &mut R) -> Result<f64>,
{
    if proposal.dim() != start.len() || names.len() != start.len() {
        return Err(Error::domain("proposal, names and start point differ in dimension"));
    }
    let walk = settings.walk;
    let mut theta = start.to_vec();
    let mut lp = log_prior(&theta);
    if !lp.is_finite() {
        return Err(Error::domain(format!("start point {theta:?} has zero prior density")));
    }
    let mut ll = loglik(&theta, rng)?;
    if !ll.is_finite() {
        return Err(Error::domain(format!("start point {theta:?} has zero likelihood")));
    }
    let mut chain = ParameterChain::new(names, settings.burn_in);
    chain.push(theta.clone(), ll, true, theta.clone());
    for _ in 0..settings.iterations {
        let psi = proposal.sample(&walk.forward(&theta), rng);
        let mut accepted = false;
        let candidate = walk.inverse(&psi);
        if let Some(cand) = &candidate {
            let lp_new = log_prior(cand);
            if lp_new.is_finite() {
                let ll_new = loglik(cand, rng)?;
                let log_alpha = ll_new + lp_new + walk.log_jacobian(cand) - ll - lp - walk.log_jacobian(&theta);
                if ll_new.is_finite() && rng.random::<f64>().ln() < log_alpha {
                    theta.clone_from(cand);
                    ll = ll_new;
                    lp = lp_new;
                    accepted = true;
                }
            }
        }
        chain.push(theta.clone(), ll, accepted, candidate.unwrap_or(psi));
    }
    Ok(chain)
}

/// Exact-likelihood MH on θ of the linear-Gaussian model.
pub fn mh_exact<R: Rng + ?Sized>(
    model: &Lgss,
    base: &LgssParams,
    y: &[f64],
    proposal: &RandomWalkProposal,
    settings: &MhSettings,
    rng: &mut R,
) -> Result<ParameterChain> {
    let prior = |v: &[f64]| {
        model
            .with_param_vector(base, v)
            .map_or(f64::NEG_INFINITY, |p| model.log_prior(&p))
    };
    let loglik = |v: &[f64], _: &mut R| Ok(kalman_filter(&base.with_theta(v[0]), y)?.loglik);
    metropolis_hastings(model.param_names(), &[base.theta], proposal, settings, prior, loglik, rng)
}

/// Particle MH: the exact likelihood is replaced by a fresh bootstrap
/// filter estimate with `n` particles at every proposal. A degenerate
/// filter run counts as a zero likelihood estimate and is rejected.
#[allow(clippy::too_many_arguments)]
pub fn pmh<M, R>(
    model: &M,
    start: &M::Params,
    y: &[f64],
    n: usize,
    pf: PfConfig,
    proposal: &RandomWalkProposal,
    settings: &MhSettings,
    rng: &mut R,
) -> Result<ParameterChain>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::Config("pmh needs n >= 1".into()));
    }
    let prior = |v: &[f64]| {
        model
            .with_param_vector(start, v)
            .map_or(f64::NEG_INFINITY, |p| model.log_prior(&p))
    };
    let loglik = |v: &[f64], rng: &mut R| {
        let p = model.with_param_vector(start, v)?;
        match bootstrap_loglik(model, &p, y, n, pf, rng) {
            Ok(l) => Ok(l),
            Err(e @ (Error::Degenerate { .. } | Error::Numerical(_))) => {
                log::warn!("particle filter failed at {v:?}: {e}; proposal rejected");
                Ok(f64::NEG_INFINITY)
            }
            Err(e) => Err(e),
        }
    };
    let theta0 = model.param_vector(start);
    metropolis_hastings(model.param_names(), &theta0, proposal, settings, prior, loglik, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gamma_logpdf, simulate};
    use crate::rng::seeded;

    #[test]
    fn rejected_rows_repeat_state_and_likelihood() {
        let y = simulate(&Lgss::default(), &LgssParams::new(1.0), 50, &mut seeded(1)).unwrap().1;
        let q = RandomWalkProposal::scalar(0.5).unwrap();
        let c = mh_exact(&Lgss::default(), &LgssParams::new(1.0), &y, &q, &MhSettings::new(500, 100), &mut seeded(2)).unwrap();
        assert_eq!(c.len(), 501);
        for m in 1..c.len() {
            if !c.accepted[m] {
                assert_eq!(c.draws[m], c.draws[m - 1]);
                assert_eq!(c.loglik[m], c.loglik[m - 1]);
            } else {
                assert_eq!(c.draws[m], c.proposals[m]);
            }
            assert!(c.draws[m][0] > 0.0);
        }
        let r = c.acceptance_rate();
        assert!(r > 0.05 && r < 0.95);
    }

    #[test]
    fn prior_ratio_matches_closed_form() {
        // log π(θ') - log π(θ) under Gam(0.01, 0.01) is -0.99·log(θ'/θ) - 0.01(θ' - θ).
        let (a, b) = (0.7, 2.3);
        let direct = gamma_logpdf(b, 0.01, 0.01).unwrap() - gamma_logpdf(a, 0.01, 0.01).unwrap();
        let closed = -0.99 * (b / a).ln() - 0.01 * (b - a);
        assert!((direct - closed).abs() < 1e-12);
        let ratio = (direct.exp() - (closed).exp()).abs();
        assert!(ratio < 1e-12);
    }

    #[test]
    fn flat_likelihood_samples_the_prior() {
        let model = Lgss { prior_shape: 3.0, prior_rate: 3.0 };
        let q = RandomWalkProposal::scalar(1.0).unwrap();
        let c = mh_exact(&model, &LgssParams::new(1.0), &[], &q, &MhSettings::new(100_000, 1000), &mut seeded(3)).unwrap();
        let s = &c.summaries()[0];
        assert!((s.mean - 1.0).abs() < 3.0 * s.mcse, "{s:?}");
    }

    #[test]
    fn start_must_have_positive_density() {
        let q = RandomWalkProposal::scalar(0.1).unwrap();
        assert!(mh_exact(&Lgss::default(), &LgssParams { theta: 1.0, ..Default::default() }, &[], &q, &MhSettings::new(1, 0), &mut seeded(1)).is_ok());
        let r = metropolis_hastings(&["x"], &[-1.0], &q, &MhSettings::new(1, 0), |v| if v[0] > 0.0 { 0.0 } else { f64::NEG_INFINITY }, |_, _| Ok(0.0), &mut seeded(1));
        assert!(r.is_err());
    }
}
