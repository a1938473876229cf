#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use smc_sysid::model::simulate;
use smc_sysid::rng::seeded;
use smc_sysid::{Lgss, LgssParams};

/// Prior covariance of `x_{1:T}` for the stationary AR(1) state.
pub fn state_cov(p: &LgssParams, len: usize) -> DMatrix<f64> {
    let v0 = 1.0 / ((1.0 - p.a * p.a) * p.theta);
    DMatrix::from_fn(len, len, |s, t| v0 * p.a.powi((s as i32 - t as i32).abs()))
}

/// Joint-Gaussian log-density of `y` with covariance `c²K + rI`.
pub fn dense_loglik(p: &LgssParams, y: &[f64]) -> f64 {
    let len = y.len();
    let cov = state_cov(p, len) * (p.c * p.c) + DMatrix::identity(len, len) * p.r;
    let chol = cov.cholesky().expect("covariance is positive definite");
    let yv = DVector::from_column_slice(y);
    let z = chol.l().solve_lower_triangular(&yv).unwrap();
    let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    -0.5 * (len as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + z.norm_squared())
}

/// Posterior mean and covariance of `x_{1:T}` given `y` by direct Gaussian
/// conditioning.
pub fn dense_posterior(p: &LgssParams, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let len = y.len();
    let k = state_cov(p, len);
    let sy = &k * (p.c * p.c) + DMatrix::identity(len, len) * p.r;
    let sy_inv = sy.try_inverse().unwrap();
    let gain = &k * p.c * &sy_inv;
    let mean = &gain * DVector::from_column_slice(y);
    let cov = &k - &gain * &k * p.c;
    (mean, cov)
}

pub fn lgss_data(theta: f64, len: usize, seed: u64) -> Vec<f64> {
    simulate(&Lgss::default(), &LgssParams::new(theta), len, &mut seeded(seed)).unwrap().1
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
