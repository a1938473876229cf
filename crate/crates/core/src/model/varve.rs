use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{gamma_logpdf, normal_log_peak, normal_logpdf, stationary_initial, StateSpaceModel};
use crate::error::{Error, Result};

/// Parameters of the ice-varve model: AR(1) coefficient `phi` and
/// process-noise precision `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarveParams {
    pub phi: f64,
    pub tau: f64,
}

impl VarveParams {
    pub fn new(phi: f64, tau: f64) -> Self {
        VarveParams { phi, tau }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi.abs() < 1.0) {
            return Err(Error::domain(format!("|phi| must be < 1, got {}", self.phi)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::domain(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(())
    }

    pub fn initial_variance(&self) -> f64 {
        1.0 / ((1.0 - self.phi * self.phi) * self.tau)
    }

    pub fn stationary(&self) -> Result<(f64, f64)> {
        stationary_initial(self.phi, self.tau)
    }
}

/// Coordinates in which gradients and search points are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coordinates {
    /// `(atanh φ, ln τ)`, unconstrained.
    #[default]
    Transformed,
    /// `(φ, τ)` as is.
    Raw,
}

/// Nonlinear, non-Gaussian ice-varve model
///
/// ```text
/// x_{t+1} | x_t ~ N(φ·x_t, τ⁻¹)
/// y_t | x_t     ~ Gam(shape = 6.25, rate = 0.256·exp(-x_t))
/// ```
///
/// with `x_1` stationary, `φ ~ U(-1, 1)` and `τ ~ Gam(0.01, 0.01)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Varve {
    pub obs_shape: f64,
    pub obs_rate_scale: f64,
    pub tau_prior_shape: f64,
    pub tau_prior_rate: f64,
    pub coordinates: Coordinates,
}

impl Default for Varve {
    fn default() -> Self {
        Varve {
            obs_shape: 6.25,
            obs_rate_scale: 0.256,
            tau_prior_shape: 0.01,
            tau_prior_rate: 0.01,
            coordinates: Coordinates::Transformed,
        }
    }
}

impl Varve {
    pub fn with_coordinates(self, coordinates: Coordinates) -> Self {
        Varve { coordinates, ..self }
    }

    fn obs_rate(&self, x: f64) -> f64 {
        self.obs_rate_scale * (-x).exp()
    }
}

impl StateSpaceModel for Varve {
    type Params = VarveParams;

    fn param_names(&self) -> &'static [&'static str] {
        &["phi", "tau"]
    }

    fn param_vector(&self, params: &VarveParams) -> Vec<f64> {
        vec![params.phi, params.tau]
    }

    fn with_param_vector(&self, _base: &VarveParams, values: &[f64]) -> Result<VarveParams> {
        let [phi, tau] = values else {
            return Err(Error::domain(format!("expected 2 parameters, got {}", values.len())));
        };
        let p = VarveParams::new(*phi, *tau);
        p.validate()?;
        Ok(p)
    }

    fn validate(&self, params: &VarveParams) -> Result<()> {
        params.validate()
    }

    fn sample_initial<R: Rng + ?Sized>(&self, params: &VarveParams, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        z * params.initial_variance().sqrt()
    }

    fn initial_logpdf(&self, params: &VarveParams, x: f64) -> f64 {
        normal_logpdf(x, 0.0, params.initial_variance())
    }

    fn sample_transition<R: Rng + ?Sized>(
        &self,
        params: &VarveParams,
        x: f64,
        _t: usize,
        rng: &mut R,
    ) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        params.phi * x + z / params.tau.sqrt()
    }

    fn transition_logpdf(&self, params: &VarveParams, from: f64, to: f64, _t: usize) -> f64 {
        normal_logpdf(to, params.phi * from, 1.0 / params.tau)
    }

    #[inline]
    fn observation_logpdf(&self, _params: &VarveParams, x: f64, y: f64, _t: usize) -> f64 {
        if !(y > 0.0) {
            return f64::NEG_INFINITY;
        }
        // Inlined Gam(y; k, s·e^{-x}) with ln(rate) = ln s - x.
        let k = self.obs_shape;
        k * (self.obs_rate_scale.ln() - x) + (k - 1.0) * y.ln() - self.obs_rate(x) * y - libm::lgamma(k)
    }

    fn observation_logpdf_batch(
        &self,
        _params: &VarveParams,
        xs: &[f64],
        y: f64,
        _t: usize,
        out: &mut [f64],
    ) {
        if !(y > 0.0) {
            out.fill(f64::NEG_INFINITY);
            return;
        }
        let k = self.obs_shape;
        let base = k * self.obs_rate_scale.ln() + (k - 1.0) * y.ln() - libm::lgamma(k);
        let sy = self.obs_rate_scale * y;
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = base - k * x - sy * (-x).exp();
        }
    }

    fn sample_observation<R: Rng + ?Sized>(
        &self,
        _params: &VarveParams,
        x: f64,
        _t: usize,
        rng: &mut R,
    ) -> f64 {
        Gamma::new(self.obs_shape, 1.0 / self.obs_rate(x))
            .expect("observation gamma parameters are positive")
            .sample(rng)
    }

    fn log_prior(&self, params: &VarveParams) -> f64 {
        if !(params.phi.abs() < 1.0) {
            return f64::NEG_INFINITY;
        }
        (0.5f64).ln()
            + gamma_logpdf(params.tau, self.tau_prior_shape, self.tau_prior_rate)
                .unwrap_or(f64::NEG_INFINITY)
    }

    fn transition_log_bound(&self, params: &VarveParams) -> Option<f64> {
        Some(normal_log_peak(1.0 / params.tau))
    }
}
