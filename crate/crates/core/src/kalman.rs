//! Exact inference for the linear-Gaussian model.
//!
//! Scalar recursions with a general observation coefficient `c`:
//!
//! ```text
//! Λ_t       = c²·P_{t|t-1} + r
//! K_t       = a·c·P_{t|t-1} / Λ_t
//! x̂_{t+1|t} = a·x̂_{t|t-1} + K_t·(y_t - c·x̂_{t|t-1})
//! P_{t+1|t} = a²·P_{t|t-1} + θ⁻¹ - a·c·K_t·P_{t|t-1}
//! ```
//!
//! started from the stationary law `x̂_{1|0} = 0`, `P_{1|0} = ((1 - a²)θ)⁻¹`.
//! The log-likelihood is the prediction-error decomposition
//! `V(θ) = Σ_t log N(y_t; c·x̂_{t|t-1}, Λ_t)`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::LgssParams;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Per-step output of [`kalman_filter`].
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanRun {
    pub pred_mean: Vec<f64>,
    pub pred_var: Vec<f64>,
    pub innovation_var: Vec<f64>,
    pub gain: Vec<f64>,
    pub filt_mean: Vec<f64>,
    pub filt_var: Vec<f64>,
    pub loglik: f64,
}

impl KalmanRun {
    pub fn len(&self) -> usize {
        self.filt_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filt_mean.is_empty()
    }
}

/// θ-derivatives of the predictor track.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRun {
    pub d_pred_mean: Vec<f64>,
    pub d_pred_var: Vec<f64>,
    pub d_gain: Vec<f64>,
    /// `dV/dθ`.
    pub gradient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmootherRun {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    /// `lag_one_cov[t] = Cov(x_{t+1}, x_t | y_{1:T})`, length `T - 1`.
    pub lag_one_cov: Vec<f64>,
}

fn positive(v: f64, what: &str, t: usize) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} = {v} at time index {t}")))
    }
}

pub fn kalman_filter(params: &LgssParams, y: &[f64]) -> Result<KalmanRun> {
    params.validate()?;
    let LgssParams { theta, a, c, r } = *params;
    let n = y.len();
    let mut run = KalmanRun {
        pred_mean: Vec::with_capacity(n),
        pred_var: Vec::with_capacity(n),
        innovation_var: Vec::with_capacity(n),
        gain: Vec::with_capacity(n),
        filt_mean: Vec::with_capacity(n),
        filt_var: Vec::with_capacity(n),
        loglik: 0.0,
    };
    let mut xp = 0.0;
    let mut pp = params.initial_variance();
    for (t, &yt) in y.iter().enumerate() {
        positive(pp, "predicted variance", t)?;
        let lambda = positive(c * c * pp + r, "innovation variance", t)?;
        let e = yt - c * xp;
        let k = a * c * pp / lambda;
        let pf = positive(pp - c * c * pp * pp / lambda, "filtered variance", t)?;
        run.pred_mean.push(xp);
        run.pred_var.push(pp);
        run.innovation_var.push(lambda);
        run.gain.push(k);
        run.filt_mean.push(xp + pp * c / lambda * e);
        run.filt_var.push(pf);
        run.loglik -= 0.5 * (LN_2PI + lambda.ln() + e * e / lambda);
        xp = a * xp + k * e;
        pp = a * a * pp + 1.0 / theta - a * c * k * pp;
    }
    Ok(run)
}

/// Filter plus the recursive θ-sensitivities of the predictor, giving the
/// exact gradient of the log-likelihood.
pub fn kalman_sensitivity(params: &LgssParams, y: &[f64]) -> Result<SensitivityRun> {
    let run = kalman_filter(params, y)?;
    let LgssParams { theta, a, c, .. } = *params;
    let n = y.len();
    let mut out = SensitivityRun {
        d_pred_mean: Vec::with_capacity(n),
        d_pred_var: Vec::with_capacity(n),
        d_gain: Vec::with_capacity(n),
        gradient: 0.0,
    };
    let mut dx = 0.0;
    let mut dp = -1.0 / ((1.0 - a * a) * theta * theta);
    for t in 0..n {
        let pp = run.pred_var[t];
        let lambda = run.innovation_var[t];
        let k = run.gain[t];
        let e = y[t] - c * run.pred_mean[t];
        let dlambda = c * c * dp;
        let dk = a * c / lambda * (1.0 - c * c * pp / lambda) * dp;
        out.d_pred_mean.push(dx);
        out.d_pred_var.push(dp);
        out.d_gain.push(dk);
        out.gradient -= 0.5
            * (dlambda / lambda - 2.0 * e * c * dx / lambda - e * e * dlambda / (lambda * lambda));
        let next_dx = (a - k * c) * dx + e * dk;
        let next_dp = (a * a - a * c * k) * dp - 1.0 / (theta * theta) - a * c * pp * dk;
        dx = next_dx;
        dp = next_dp;
    }
    Ok(out)
}

/// `dV/dθ` at `params`.
pub fn kalman_gradient(params: &LgssParams, y: &[f64]) -> Result<f64> {
    Ok(kalman_sensitivity(params, y)?.gradient)
}

/// Fixed-interval (RTS) smoother with lag-one cross-covariances.
pub fn rts_smoother(params: &LgssParams, y: &[f64]) -> Result<SmootherRun> {
    let run = kalman_filter(params, y)?;
    smooth_from_filter(params, &run)
}

pub fn smooth_from_filter(params: &LgssParams, run: &KalmanRun) -> Result<SmootherRun> {
    let n = run.len();
    if n == 0 {
        return Err(Error::domain("smoothing needs at least one observation"));
    }
    let a = params.a;
    let q = 1.0 / params.theta;
    let mut mean = run.filt_mean.clone();
    let mut var = run.filt_var.clone();
    let mut lag_one_cov = vec![0.0; n - 1];
    for t in (0..n - 1).rev() {
        let pred_var = a * a * run.filt_var[t] + q;
        let j = run.filt_var[t] * a / pred_var;
        mean[t] = run.filt_mean[t] + j * (mean[t + 1] - a * run.filt_mean[t]);
        var[t] = positive(
            run.filt_var[t] + j * j * (var[t + 1] - pred_var),
            "smoothed variance",
            t,
        )?;
        lag_one_cov[t] = j * var[t + 1];
    }
    Ok(SmootherRun { mean, var, lag_one_cov })
}

/// Draws one trajectory from `p_θ(x_{1:T} | y_{1:T})` by backward simulation
/// through the filtering densities.
pub fn backward_sample<R: Rng + ?Sized>(params: &LgssParams, run: &KalmanRun, rng: &mut R) -> Vec<f64> {
    let n = run.len();
    let mut x = vec![0.0; n];
    if n == 0 {
        return x;
    }
    let a = params.a;
    let q = 1.0 / params.theta;
    let mut z = || -> f64 { StandardNormal.sample(rng) };
    x[n - 1] = run.filt_mean[n - 1] + run.filt_var[n - 1].sqrt() * z();
    for t in (0..n - 1).rev() {
        let (m, p) = (run.filt_mean[t], run.filt_var[t]);
        let denom = q + a * a * p;
        let mu = m + a * p / denom * (x[t + 1] - a * m);
        let sigma2 = p - a * a * p * p / denom;
        x[t] = mu + sigma2.sqrt() * z();
    }
    x
}

/// Log-density of a trajectory under the backward-sampling law, which equals
/// `log p_θ(x_{1:T} | y_{1:T})`.
pub fn backward_logpdf(params: &LgssParams, run: &KalmanRun, x: &[f64]) -> f64 {
    use crate::model::normal_logpdf;
    let n = run.len();
    if n == 0 {
        return 0.0;
    }
    let a = params.a;
    let q = 1.0 / params.theta;
    let mut total = normal_logpdf(x[n - 1], run.filt_mean[n - 1], run.filt_var[n - 1]);
    for t in (0..n - 1).rev() {
        let (m, p) = (run.filt_mean[t], run.filt_var[t]);
        let denom = q + a * a * p;
        total += normal_logpdf(x[t], m + a * p / denom * (x[t + 1] - a * m), p - a * a * p * p / denom);
    }
    total
}

#[cfg(test)]
mod tests;
