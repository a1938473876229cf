use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::model::VarveParams;

const MAX_PROPOSALS: usize = 100_000;

/// Acceptance probability `1{|φ| < 1}·√(1 - φ²)` of a proposed `φ`.
pub fn varve_acceptance_probability(phi: f64) -> f64 {
    if phi.abs() < 1.0 {
        (1.0 - phi * phi).sqrt()
    } else {
        0.0
    }
}

struct Moments {
    /// Σ_{t=1}^{T} x_t²
    all: f64,
    /// Σ_{t=1}^{T-1} x_{t+1}·x_t
    cross: f64,
    /// Σ_{t=2}^{T-1} x_t²
    interior: f64,
    len: f64,
}

impl Moments {
    fn new(x: &[f64]) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::domain("conditional draw needs T >= 3"));
        }
        let interior: f64 = x[1..x.len() - 1].iter().map(|v| v * v).sum();
        if !(interior > 0.0) {
            return Err(Error::domain("interior states are all zero"));
        }
        Ok(Moments {
            all: x.iter().map(|v| v * v).sum(),
            cross: x.windows(2).map(|w| w[0] * w[1]).sum(),
            interior,
            len: x.len() as f64,
        })
    }

    /// `(1 - φ²)x₁² + Σ(x_{t+1} - φx_t)²`.
    fn quad(&self, phi: f64) -> f64 {
        self.all - 2.0 * phi * self.cross + phi * phi * self.interior
    }
}

/// Unnormalised `log p(φ, τ | x_{1:T})` under `φ ~ U(-1, 1)`,
/// `τ ~ Gam(a, b)`.
pub fn varve_conditional_logpdf(x: &[f64], a: f64, b: f64, phi: f64, tau: f64) -> Result<f64> {
    let m = Moments::new(x)?;
    if !(phi.abs() < 1.0) || !(tau > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((a + m.len / 2.0 - 1.0) * tau.ln() - b * tau + 0.5 * (1.0 - phi * phi).ln() - 0.5 * tau * m.quad(phi))
}

/// Exact draw from `p(φ, τ | x_{1:T})` with `φ ~ U(-1, 1)` and
/// `τ ~ Gam(a, b)` (shape–rate).
///
/// Completing the square gives the instrumental law
/// `τ ~ Gam(a + (T-1)/2, b̃)`, `φ | τ ~ N(μ̃, (τ·Σ_{t=2}^{T-1} x_t²)⁻¹)`,
/// accepted with probability `√(1 - φ²)` on `|φ| < 1`. When `b̃ ≤ 0` the
/// instrumental law is improper; then, and after a long run of rejections,
/// `φ` is drawn from its marginal `∝ √(1-φ²)(b + Q(φ)/2)^{-(a+T/2)}` by
/// uniform rejection and `τ | φ ~ Gam(a + T/2, b + Q(φ)/2)`.
pub fn sample_varve_conditional<R: Rng + ?Sized>(x: &[f64], a: f64, b: f64, rng: &mut R) -> Result<VarveParams> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("prior shape and rate must be positive"));
    }
    let m = Moments::new(x)?;
    let mu = m.cross / m.interior;
    let b_tilde = b + 0.5 * m.all - 0.5 * m.cross * m.cross / m.interior;
    if b_tilde > 0.0 {
        let gamma = Gamma::new(a + (m.len - 1.0) / 2.0, 1.0 / b_tilde)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        for _ in 0..MAX_PROPOSALS {
            let tau: f64 = gamma.sample(rng);
            if !(tau > 0.0) {
                continue;
            }
            let z: f64 = StandardNormal.sample(rng);
            let phi = mu + z / (tau * m.interior).sqrt();
            if rng.random::<f64>() < varve_acceptance_probability(phi) {
                return Ok(VarveParams::new(phi, tau));
            }
        }
        log::debug!("instrumental rejection exhausted; sampling the marginal of phi");
    }
    marginal_draw(&m, a, b, rng)
}

fn marginal_draw<R: Rng + ?Sized>(m: &Moments, a: f64, b: f64, rng: &mut R) -> Result<VarveParams> {
    let k = a + m.len / 2.0;
    let q_min = m.quad((m.cross / m.interior).clamp(-1.0, 1.0));
    let floor = (b + 0.5 * q_min).ln();
    for _ in 0..MAX_PROPOSALS * 10 {
        let phi = 2.0 * rng.random::<f64>() - 1.0;
        let log_acc = 0.5 * (1.0 - phi * phi).ln() - k * ((b + 0.5 * m.quad(phi)).ln() - floor);
        if rng.random::<f64>().ln() < log_acc {
            let rate = b + 0.5 * m.quad(phi);
            let tau: f64 = Gamma::new(k, 1.0 / rate)
                .map_err(|e| Error::Numerical(e.to_string()))?
                .sample(rng);
            return Ok(VarveParams::new(phi, tau.max(f64::MIN_POSITIVE)));
        }
    }
    Err(Error::Numerical("conditional sampler for (phi, tau) did not accept".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn acceptance_probability_examples() {
        assert_eq!(varve_acceptance_probability(0.0), 1.0);
        assert_eq!(varve_acceptance_probability(1.0), 0.0);
        assert_eq!(varve_acceptance_probability(-1.3), 0.0);
        assert!((varve_acceptance_probability(0.6) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn preconditions() {
        let mut rng = seeded(1);
        assert!(sample_varve_conditional(&[0.1, 0.2], 0.01, 0.01, &mut rng).is_err());
        assert!(sample_varve_conditional(&[0.1, 0.0, 0.0, 0.3], 0.01, 0.01, &mut rng).is_err());
        assert!(sample_varve_conditional(&[0.1, 0.2, 0.3], 0.0, 0.01, &mut rng).is_err());
    }

    #[test]
    fn improper_instrumental_case_still_samples() {
        // x = (1, 1, 1) gives b̃ = b - 1/2 < 0.
        let mut rng = seeded(2);
        for _ in 0..200 {
            let p = sample_varve_conditional(&[1.0, 1.0, 1.0], 0.01, 0.01, &mut rng).unwrap();
            assert!(p.phi.abs() < 1.0 && p.tau > 0.0);
        }
    }

    #[test]
    fn log_density_shape() {
        let x = [0.3, -0.2, 0.5, 0.45];
        assert_eq!(varve_conditional_logpdf(&x, 0.01, 0.01, 1.0, 1.0).unwrap(), f64::NEG_INFINITY);
        let l1 = varve_conditional_logpdf(&x, 0.01, 0.01, 0.2, 3.0).unwrap();
        let l2 = varve_conditional_logpdf(&x, 0.01, 0.01, 0.4, 3.0).unwrap();
        // Direct: prior × stationary initial × transitions, up to constants.
        let direct = |phi: f64, tau: f64| {
            let mut v = (0.01f64 - 1.0) * tau.ln() - 0.01 * tau;
            v += 0.5 * ((1.0 - phi * phi) * tau).ln() - 0.5 * (1.0 - phi * phi) * tau * x[0] * x[0];
            for w in x.windows(2) {
                v += 0.5 * tau.ln() - 0.5 * tau * (w[1] - phi * w[0]).powi(2);
            }
            v
        };
        assert!(((l1 - l2) - (direct(0.2, 3.0) - direct(0.4, 3.0))).abs() < 1e-12);
    }
}
