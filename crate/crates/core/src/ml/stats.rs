use serde::Serialize;

use crate::error::{Error, Result};
use crate::kalman::SmootherRun;
use crate::model::{Lgss, LgssParams, StateSpaceModel, Varve, VarveParams};

/// Complete-data sufficient statistics of a stationary AR(1) state process,
/// each averaged over the `T - 1` transitions:
///
/// ```text
/// Ψ = mean x_{t+1}·x_t    Φ = mean x_{t+1}²    Σ = mean x_t²    X = x₁²
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientStats {
    pub psi: f64,
    pub phi: f64,
    pub sigma: f64,
    pub x: f64,
}

impl SufficientStats {
    pub fn from_trajectory(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::domain("sufficient statistics need T >= 2"));
        }
        let m = (x.len() - 1) as f64;
        let (mut psi, mut phi, mut sigma) = (0.0, 0.0, 0.0);
        for w in x.windows(2) {
            psi += w[1] * w[0];
            phi += w[1] * w[1];
            sigma += w[0] * w[0];
        }
        Ok(SufficientStats { psi: psi / m, phi: phi / m, sigma: sigma / m, x: x[0] * x[0] })
    }

    /// Weighted average over trajectories; `weights = None` means equal.
    pub fn from_weighted(trajectories: &[Vec<f64>], weights: Option<&[f64]>) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(Error::domain("no trajectories"));
        }
        let equal = 1.0 / trajectories.len() as f64;
        let mut acc = SufficientStats { psi: 0.0, phi: 0.0, sigma: 0.0, x: 0.0 };
        for (i, traj) in trajectories.iter().enumerate() {
            let w = weights.map_or(equal, |w| w[i]);
            let s = Self::from_trajectory(traj)?;
            acc.psi += w * s.psi;
            acc.phi += w * s.phi;
            acc.sigma += w * s.sigma;
            acc.x += w * s.x;
        }
        Ok(acc)
    }

    /// Posterior expectations from smoothed moments.
    pub fn from_smoother(sm: &SmootherRun) -> Result<Self> {
        let n = sm.mean.len();
        if n < 2 {
            return Err(Error::domain("sufficient statistics need T >= 2"));
        }
        let m = (n - 1) as f64;
        let second = |t: usize| sm.mean[t] * sm.mean[t] + sm.var[t];
        let (mut psi, mut phi, mut sigma) = (0.0, 0.0, 0.0);
        for t in 0..n - 1 {
            psi += sm.mean[t + 1] * sm.mean[t] + sm.lag_one_cov[t];
            phi += second(t + 1);
            sigma += second(t);
        }
        Ok(SufficientStats { psi: psi / m, phi: phi / m, sigma: sigma / m, x: second(0) })
    }

    /// Stochastic-approximation update `(1 - α)·self + α·new`.
    pub fn blend(&self, new: &Self, alpha: f64) -> Self {
        let mix = |a: f64, b: f64| a + alpha * (b - a);
        SufficientStats {
            psi: mix(self.psi, new.psi),
            phi: mix(self.phi, new.phi),
            sigma: mix(self.sigma, new.sigma),
            x: mix(self.x, new.x),
        }
    }

    fn residual(&self, coef: f64) -> f64 {
        self.phi - 2.0 * self.psi * coef + coef * coef * self.sigma
    }

    /// `f(θ; S) = -log((1-φ²)τ) + X(1-φ²)τ + (T-1){-log τ + τ(Φ - 2Ψφ + φ²Σ)}`,
    /// minus twice the expected complete-data log-likelihood up to constants.
    pub fn objective(&self, coef: f64, precision: f64, len: usize) -> f64 {
        let one_m = 1.0 - coef * coef;
        let m = (len - 1) as f64;
        -(one_m * precision).ln()
            + self.x * one_m * precision
            + m * (-precision.ln() + precision * self.residual(coef))
    }

    /// Minimiser `(Ψ/Σ, (Φ - Ψ²/Σ)⁻¹)` of the transition term alone; `None`
    /// when that term has no interior minimum.
    pub fn closed_form_start(&self) -> Option<(f64, f64)> {
        if !(self.sigma > 0.0) {
            return None;
        }
        let coef = self.psi / self.sigma;
        let resid = self.phi - self.psi * coef;
        (resid > 0.0).then(|| (coef, 1.0 / resid))
    }

    /// Optimal precision for a fixed coefficient.
    pub fn profile_precision(&self, coef: f64, len: usize) -> Result<f64> {
        let denom = self.x * (1.0 - coef * coef) + (len - 1) as f64 * self.residual(coef);
        if denom > 0.0 && denom.is_finite() {
            Ok(len as f64 / denom)
        } else {
            Err(Error::Numerical(format!("degenerate statistics at coefficient {coef}")))
        }
    }

    /// Joint minimiser of [`objective`](Self::objective) over `|φ| < 1`,
    /// `τ > 0`.
    ///
    /// `τ` is profiled out in closed form, leaving
    /// `-log(1-φ²) + T·log(X(1-φ²) + (T-1)·q(φ))` in `u = atanh φ`, which is
    /// scanned on a grid and refined by golden-section search to 1e-10.
    pub fn maximize_ar1(&self, len: usize) -> Result<(f64, f64)> {
        if len < 2 {
            return Err(Error::domain("M-step needs T >= 2"));
        }
        let n = len as f64;
        let m = n - 1.0;
        let profile = |u: f64| {
            let c = u.tanh();
            let one_m = 1.0 - c * c;
            let denom = self.x * one_m + m * self.residual(c);
            if denom > 0.0 && one_m > 0.0 {
                -one_m.ln() + n * denom.ln()
            } else {
                f64::INFINITY
            }
        };
        const GRID: usize = 4000;
        const SPAN: f64 = 9.0;
        let at = |i: usize| -SPAN + 2.0 * SPAN * i as f64 / GRID as f64;
        let mut best = (0usize, f64::INFINITY);
        for i in 0..=GRID {
            let v = profile(at(i));
            if v < best.1 {
                best = (i, v);
            }
        }
        let mut start = at(best.0);
        if let Some((c, _)) = self.closed_form_start() {
            if c.abs() < 1.0 && profile(c.atanh()) < best.1 {
                start = c.atanh();
            }
        }
        if !best.1.is_finite() && !profile(start).is_finite() {
            return Err(Error::Numerical("M-step objective is infinite everywhere".into()));
        }
        let h = 2.0 * SPAN / GRID as f64;
        let u = golden_min(profile, start - h, start + h, 1e-10);
        let coef = u.tanh();
        Ok((coef, self.profile_precision(coef, len)?))
    }

    /// Closed-form precision with the coefficient fixed at `coef`.
    pub fn maximize_precision(&self, coef: f64, len: usize) -> Result<f64> {
        if len < 2 {
            return Err(Error::domain("M-step needs T >= 2"));
        }
        self.profile_precision(coef, len)
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Models with a closed-form or numerical M-step on [`SufficientStats`].
pub trait EmModel: StateSpaceModel {
    fn m_step(&self, base: &Self::Params, stats: &SufficientStats, len: usize) -> Result<Self::Params>;
}

impl EmModel for Lgss {
    /// `θ = T / ((1-a²)X + (T-1)(Φ - 2aΨ + a²Σ))`, with `a` held fixed.
    fn m_step(&self, base: &LgssParams, stats: &SufficientStats, len: usize) -> Result<LgssParams> {
        Ok(base.with_theta(stats.maximize_precision(base.a, len)?))
    }
}

impl EmModel for Varve {
    fn m_step(&self, _base: &VarveParams, stats: &SufficientStats, len: usize) -> Result<VarveParams> {
        let (phi, tau) = stats.maximize_ar1(len)?;
        Ok(VarveParams::new(phi, tau))
    }
}
