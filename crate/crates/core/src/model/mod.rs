//! State-space model abstraction and the two reference models.
//!
//! A model is a scalar-state, scalar-observation SSM
//!
//! ```text
//! x_1 ~ μ_θ(x_1),   x_{t+1} | x_t ~ f_θ(x_{t+1} | x_t),   y_t | x_t ~ g_θ(y_t | x_t)
//! ```
//!
//! with a prior π(θ). The fixed structure of a model lives on the model value
//! (prior hyperparameters, observation constants); the parameters being
//! identified live in [`StateSpaceModel::Params`].

mod dataset;
mod density;
mod lgss;
mod varve;

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

pub use dataset::Dataset;
pub use density::{gamma_logpdf, normal_log_peak, normal_logpdf};
pub use lgss::{Lgss, LgssParams};
pub use varve::{Coordinates, Varve, VarveParams};

/// Behavioural contract of a parameterised state-space model.
///
/// Density evaluations return finite values or `-inf`, never NaN, for
/// parameters inside the declared space. Samplers draw from the matching
/// density.
pub trait StateSpaceModel: Sync {
    type Params: Clone + fmt::Debug + Send + Sync;

    fn param_names(&self) -> &'static [&'static str];

    fn param_dim(&self) -> usize {
        self.param_names().len()
    }

    /// The identified components of `params`, in `param_names` order.
    fn param_vector(&self, params: &Self::Params) -> Vec<f64>;

    /// `base` with its identified components replaced by `values`.
    ///
    /// Values outside the parameter space are a domain error.
    fn with_param_vector(&self, base: &Self::Params, values: &[f64]) -> Result<Self::Params>;

    fn validate(&self, params: &Self::Params) -> Result<()>;

    fn sample_initial<R: Rng + ?Sized>(&self, params: &Self::Params, rng: &mut R) -> f64;

    fn initial_logpdf(&self, params: &Self::Params, x: f64) -> f64;

    fn sample_transition<R: Rng + ?Sized>(
        &self,
        params: &Self::Params,
        x: f64,
        t: usize,
        rng: &mut R,
    ) -> f64;

    fn transition_logpdf(&self, params: &Self::Params, from: f64, to: f64, t: usize) -> f64;

    fn observation_logpdf(&self, params: &Self::Params, x: f64, y: f64, t: usize) -> f64;

    /// `out[i] = observation_logpdf(params, xs[i], y, t)`.
    fn observation_logpdf_batch(
        &self,
        params: &Self::Params,
        xs: &[f64],
        y: f64,
        t: usize,
        out: &mut [f64],
    ) {
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = self.observation_logpdf(params, x, y, t);
        }
    }

    fn sample_observation<R: Rng + ?Sized>(
        &self,
        params: &Self::Params,
        x: f64,
        t: usize,
        rng: &mut R,
    ) -> f64;

    fn log_prior(&self, params: &Self::Params) -> f64;

    /// Finite upper bound on `transition_logpdf(params, ·, ·, t)` when one exists.
    fn transition_log_bound(&self, _params: &Self::Params) -> Option<f64> {
        None
    }
}

/// Forward simulation of `len` states and observations.
pub fn simulate<M, R>(
    model: &M,
    params: &M::Params,
    len: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    model.validate(params)?;
    let mut states = Vec::with_capacity(len);
    let mut observations = Vec::with_capacity(len);
    for t in 0..len {
        let x = match states.last() {
            None => model.sample_initial(params, rng),
            Some(&prev) => model.sample_transition(params, prev, t - 1, rng),
        };
        observations.push(model.sample_observation(params, x, t, rng));
        states.push(x);
    }
    Ok((states, observations))
}

/// Complete-data log-density `log p_θ(x_{1:T}, y_{1:T})`.
pub fn log_joint<M: StateSpaceModel>(
    model: &M,
    params: &M::Params,
    states: &[f64],
    observations: &[f64],
) -> Result<f64> {
    if states.len() != observations.len() {
        return Err(Error::domain(format!(
            "state and observation lengths differ ({} vs {})",
            states.len(),
            observations.len()
        )));
    }
    if states.is_empty() {
        return Err(Error::domain("log_joint needs at least one time step"));
    }
    let mut total = model.initial_logpdf(params, states[0]);
    for (t, (&x, &y)) in states.iter().zip(observations).enumerate() {
        total += model.observation_logpdf(params, x, y, t);
    }
    for (t, pair) in states.windows(2).enumerate() {
        total += model.transition_logpdf(params, pair[0], pair[1], t);
    }
    Ok(total)
}

/// Stationary law `N(0, ((1 - a²)·precision)⁻¹)` of `x_{t+1} = a·x_t + v_t`,
/// `v_t ~ N(0, precision⁻¹)`. Returns `(mean, variance)`.
pub fn stationary_initial(coefficient: f64, precision: f64) -> Result<(f64, f64)> {
    if !(coefficient.abs() < 1.0) {
        return Err(Error::domain(format!(
            "state coefficient {coefficient} is not stationary (|a| must be < 1)"
        )));
    }
    if !(precision > 0.0) {
        return Err(Error::domain(format!("precision must be positive, got {precision}")));
    }
    Ok((0.0, 1.0 / ((1.0 - coefficient * coefficient) * precision)))
}

#[cfg(test)]
mod tests;
