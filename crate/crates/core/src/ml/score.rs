use rand::Rng;

use super::GradientProvider;
use crate::error::{Error, Result};
use crate::kalman::kalman_sensitivity;
use crate::model::{Coordinates, Lgss, LgssParams, StateSpaceModel, Varve, VarveParams};
use crate::smc::{bootstrap_pf, ffbsi, BackwardMode, PfConfig};

const EDGE: f64 = 1e-6;

/// Models whose complete-data score is available in closed form, expressed
/// in the model's search coordinates.
pub trait ScoreModel: StateSpaceModel {
    fn to_search(&self, params: &Self::Params) -> Vec<f64>;

    #[allow(clippy::wrong_self_convention)]
    fn from_search(&self, base: &Self::Params, point: &[f64]) -> Result<Self::Params>;

    /// Moves `point` onto the feasible set; returns whether it moved.
    fn project_search(&self, point: &mut [f64]) -> bool;

    /// `∇ log p_θ(x_{1:T}, y_{1:T})` in search coordinates. Observation
    /// terms do not depend on the parameters for the models here.
    fn complete_score(&self, params: &Self::Params, x: &[f64]) -> Vec<f64>;
}

fn residual_sums(coef: f64, x: &[f64]) -> (f64, f64) {
    // (Σ x_t (x_{t+1} - coef·x_t), Σ (x_{t+1} - coef·x_t)²)
    x.windows(2).fold((0.0, 0.0), |(cross, sq), w| {
        let e = w[1] - coef * w[0];
        (cross + w[0] * e, sq + e * e)
    })
}

impl ScoreModel for Lgss {
    fn to_search(&self, params: &LgssParams) -> Vec<f64> {
        vec![params.theta]
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_search(&self, base: &LgssParams, point: &[f64]) -> Result<LgssParams> {
        self.with_param_vector(base, point)
    }

    fn project_search(&self, point: &mut [f64]) -> bool {
        if !(point[0] > 0.0) || !point[0].is_finite() {
            point[0] = if point[0] == f64::INFINITY { f64::MAX } else { EDGE };
            true
        } else {
            false
        }
    }

    /// `½[T/θ - (1 - a²)x₁² - Σ(x_{t+1} - a·x_t)²]`.
    fn complete_score(&self, p: &LgssParams, x: &[f64]) -> Vec<f64> {
        if x.is_empty() {
            return vec![0.0];
        }
        let (_, sq) = residual_sums(p.a, x);
        let len = x.len() as f64;
        vec![0.5 * (len / p.theta - (1.0 - p.a * p.a) * x[0] * x[0] - sq)]
    }
}

impl ScoreModel for Varve {
    fn to_search(&self, p: &VarveParams) -> Vec<f64> {
        match self.coordinates {
            Coordinates::Transformed => vec![p.phi.atanh(), p.tau.ln()],
            Coordinates::Raw => vec![p.phi, p.tau],
        }
    }

    fn from_search(&self, _base: &VarveParams, point: &[f64]) -> Result<VarveParams> {
        let [u, v] = point else {
            return Err(Error::domain(format!("expected 2 coordinates, got {}", point.len())));
        };
        let p = match self.coordinates {
            Coordinates::Transformed => VarveParams::new(u.tanh(), v.exp()),
            Coordinates::Raw => VarveParams::new(*u, *v),
        };
        p.validate()?;
        Ok(p)
    }

    fn project_search(&self, point: &mut [f64]) -> bool {
        let mut moved = false;
        match self.coordinates {
            Coordinates::Transformed => {
                // tanh saturates to ±1 in f64 beyond |u| ≈ 19.
                let lim = (1.0 - EDGE).atanh();
                for (v, bound) in point.iter_mut().zip([lim, 700.0]) {
                    if !(v.abs() <= bound) {
                        *v = if v.is_nan() { 0.0 } else { bound.copysign(*v) };
                        moved = true;
                    }
                }
            }
            Coordinates::Raw => {
                if !(point[0].abs() < 1.0) {
                    point[0] = if point[0].is_nan() { 0.0 } else { (1.0 - EDGE).copysign(point[0]) };
                    moved = true;
                }
                if !(point[1] > 0.0) {
                    point[1] = EDGE;
                    moved = true;
                }
            }
        }
        moved
    }

    /// Transformed coordinates `(atanh φ, ln τ)`:
    ///
    /// ```text
    /// ∂/∂φ̃ = -φ + (1 - φ²)·τ·{φ·x₁² + Σ x_t(x_{t+1} - φ·x_t)}
    /// ∂/∂τ̃ = ½{T - τ(1 - φ²)x₁² - τ·Σ(x_{t+1} - φ·x_t)²}
    /// ```
    fn complete_score(&self, p: &VarveParams, x: &[f64]) -> Vec<f64> {
        if x.is_empty() {
            return vec![0.0, 0.0];
        }
        let VarveParams { phi, tau } = *p;
        let (cross, sq) = residual_sums(phi, x);
        let len = x.len() as f64;
        let x1sq = x[0] * x[0];
        let one_m = 1.0 - phi * phi;
        let d_phi = -phi / one_m + tau * (phi * x1sq + cross);
        let d_tau = 0.5 * (len / tau - one_m * x1sq - sq);
        match self.coordinates {
            Coordinates::Transformed => vec![one_m * d_phi, tau * d_tau],
            Coordinates::Raw => vec![d_phi, d_tau],
        }
    }
}

/// Fisher's identity: `Σ_i w_i ∇ log p_θ(x^i_{1:T}, y_{1:T})` over weighted
/// trajectories. `weights = None` means equal weights.
pub fn fisher_gradient<M: ScoreModel>(
    model: &M,
    params: &M::Params,
    trajectories: &[Vec<f64>],
    weights: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if trajectories.is_empty() {
        return Err(Error::domain("no trajectories"));
    }
    if let Some(w) = weights {
        if w.len() != trajectories.len() {
            return Err(Error::domain("weights and trajectories differ in length"));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::domain(format!("trajectory weights sum to {sum}")));
        }
    }
    let equal = 1.0 / trajectories.len() as f64;
    let mut grad = vec![0.0; model.param_dim()];
    for (i, traj) in trajectories.iter().enumerate() {
        let w = weights.map_or(equal, |w| w[i]);
        for (g, s) in grad.iter_mut().zip(model.complete_score(params, traj)) {
            *g += w * s;
        }
    }
    Ok(grad)
}

/// Exact `(V(θ), dV/dθ)` from the Kalman filter and its sensitivities.
#[derive(Debug, Clone)]
pub struct KalmanScore<'a> {
    pub base: LgssParams,
    pub y: &'a [f64],
}

impl GradientProvider for KalmanScore<'_> {
    fn evaluate(&mut self, point: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p = self.base.with_theta(point[0]);
        let s = kalman_sensitivity(&p, self.y)?;
        let v = crate::kalman::kalman_filter(&p, self.y)?.loglik;
        Ok((v, vec![s.gradient]))
    }

    fn project(&self, point: &mut [f64]) -> bool {
        Lgss::default().project_search(point)
    }

    fn is_exact(&self) -> bool {
        true
    }
}

/// Particle estimate of the log-likelihood and its gradient: a bootstrap
/// filter with `n` particles followed by `m` FFBSi trajectories.
pub struct ParticleScore<'a, M: ScoreModel, R: Rng> {
    pub model: &'a M,
    pub base: M::Params,
    pub y: &'a [f64],
    pub n: usize,
    pub m: usize,
    pub mode: BackwardMode,
    pub pf: PfConfig,
    pub rng: R,
}

impl<M: ScoreModel, R: Rng> GradientProvider for ParticleScore<'_, M, R> {
    fn evaluate(&mut self, point: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p = self.model.from_search(&self.base, point)?;
        let ps = bootstrap_pf(self.model, &p, self.y, self.n, self.pf, &mut self.rng)?;
        let trajs = ffbsi(self.model, &p, &ps, self.m, self.mode, &mut self.rng)?;
        Ok((ps.loglik, fisher_gradient(self.model, &p, &trajs, None)?))
    }

    fn project(&self, point: &mut [f64]) -> bool {
        self.model.project_search(point)
    }
}
