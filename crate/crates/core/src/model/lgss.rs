use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{gamma_logpdf, normal_log_peak, normal_logpdf, stationary_initial, StateSpaceModel};
use crate::error::{Error, Result};

/// Parameters of the linear-Gaussian model
///
/// ```text
/// x_{t+1} = a·x_t + v_t,  v_t ~ N(0, θ⁻¹)
/// y_t     = c·x_t + e_t,  e_t ~ N(0, r)
/// ```
///
/// with `x_1` drawn from the stationary law. Only `theta` is identified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgssParams {
    /// Process-noise precision.
    pub theta: f64,
    pub a: f64,
    pub c: f64,
    /// Observation-noise variance.
    pub r: f64,
}

impl LgssParams {
    pub const DEFAULT_A: f64 = 0.7;
    pub const DEFAULT_C: f64 = 0.5;
    pub const DEFAULT_R: f64 = 0.1;

    pub fn new(theta: f64) -> Self {
        LgssParams {
            theta,
            a: Self::DEFAULT_A,
            c: Self::DEFAULT_C,
            r: Self::DEFAULT_R,
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        LgssParams { theta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive, got {}", self.theta)));
        }
        if !(self.a.abs() < 1.0) {
            return Err(Error::domain(format!("|a| must be < 1, got {}", self.a)));
        }
        if !(self.r > 0.0) {
            return Err(Error::domain(format!("r must be positive, got {}", self.r)));
        }
        if !self.c.is_finite() {
            return Err(Error::domain("c must be finite"));
        }
        Ok(())
    }

    /// Variance of the stationary initial state, `((1 - a²)θ)⁻¹`.
    pub fn initial_variance(&self) -> f64 {
        1.0 / ((1.0 - self.a * self.a) * self.theta)
    }

    pub fn stationary(&self) -> Result<(f64, f64)> {
        stationary_initial(self.a, self.theta)
    }
}

impl Default for LgssParams {
    fn default() -> Self {
        LgssParams::new(1.0)
    }
}

/// Linear-Gaussian reference model with a conjugate `Gam(shape, rate)` prior on θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lgss {
    pub prior_shape: f64,
    pub prior_rate: f64,
}

impl Default for Lgss {
    fn default() -> Self {
        Lgss {
            prior_shape: 0.01,
            prior_rate: 0.01,
        }
    }
}

impl StateSpaceModel for Lgss {
    type Params = LgssParams;

    fn param_names(&self) -> &'static [&'static str] {
        &["theta"]
    }

    fn param_vector(&self, params: &LgssParams) -> Vec<f64> {
        vec![params.theta]
    }

    fn with_param_vector(&self, base: &LgssParams, values: &[f64]) -> Result<LgssParams> {
        let [theta] = values else {
            return Err(Error::domain(format!("expected 1 parameter, got {}", values.len())));
        };
        let p = base.with_theta(*theta);
        p.validate()?;
        Ok(p)
    }

    fn validate(&self, params: &LgssParams) -> Result<()> {
        params.validate()
    }

    fn sample_initial<R: Rng + ?Sized>(&self, params: &LgssParams, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        z * params.initial_variance().sqrt()
    }

    fn initial_logpdf(&self, params: &LgssParams, x: f64) -> f64 {
        normal_logpdf(x, 0.0, params.initial_variance())
    }

    fn sample_transition<R: Rng + ?Sized>(
        &self,
        params: &LgssParams,
        x: f64,
        _t: usize,
        rng: &mut R,
    ) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        params.a * x + z / params.theta.sqrt()
    }

    fn transition_logpdf(&self, params: &LgssParams, from: f64, to: f64, _t: usize) -> f64 {
        normal_logpdf(to, params.a * from, 1.0 / params.theta)
    }

    fn observation_logpdf(&self, params: &LgssParams, x: f64, y: f64, _t: usize) -> f64 {
        normal_logpdf(y, params.c * x, params.r)
    }

    fn sample_observation<R: Rng + ?Sized>(
        &self,
        params: &LgssParams,
        x: f64,
        _t: usize,
        rng: &mut R,
    ) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        params.c * x + z * params.r.sqrt()
    }

    fn log_prior(&self, params: &LgssParams) -> f64 {
        gamma_logpdf(params.theta, self.prior_shape, self.prior_rate).unwrap_or(f64::NEG_INFINITY)
    }

    fn transition_log_bound(&self, params: &LgssParams) -> Option<f64> {
        Some(normal_log_peak(1.0 / params.theta))
    }
}
