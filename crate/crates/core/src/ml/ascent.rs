use serde::Serialize;

use crate::error::{Error, Result};

/// Source of objective values and gradients in search coordinates.
pub trait GradientProvider {
    /// Objective (log-likelihood or its estimate) and gradient at `point`.
    fn evaluate(&mut self, point: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// Moves `point` back into the feasible set; returns whether it moved.
    fn project(&self, _point: &mut [f64]) -> bool {
        false
    }

    /// Exact objectives allow backtracking on a decrease.
    fn is_exact(&self) -> bool {
        false
    }
}

/// Step at iteration `k` is `step_base · k^{-decay}`. `decay` is the
/// positive magnitude of the exponent; `decay = 0` gives a constant step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AscentConfig {
    pub step_base: f64,
    pub decay: f64,
    pub max_iter: usize,
    /// Stop when `max_i |θ_k - θ_{k-1}| < tol`.
    pub tol: f64,
    /// Halve the step while an exact objective decreases.
    pub backtrack: bool,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig { step_base: 0.01, decay: 2.0 / 3.0, max_iter: 250, tol: 1e-6, backtrack: true }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_base > 0.0 && self.step_base.is_finite()) {
            return Err(Error::Config(format!("step_base must be positive, got {}", self.step_base)));
        }
        if !(0.0..=1.0).contains(&self.decay) {
            return Err(Error::Config(format!("decay must lie in [0, 1], got {}", self.decay)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config("tol must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iterate {
    pub k: usize,
    pub point: Vec<f64>,
    pub objective: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult {
    pub estimate: Vec<f64>,
    pub history: Vec<Iterate>,
    pub converged: bool,
}

const MAX_HALVINGS: usize = 60;

/// `θ_k = θ_{k-1} + γ·k^{-α}·∇V(θ_{k-1})`, with projection onto the
/// feasible set and optional backtracking for exact objectives.
pub fn gradient_ascent_ml<P: GradientProvider + ?Sized>(
    provider: &mut P,
    start: &[f64],
    config: &AscentConfig,
) -> Result<AscentResult> {
    config.validate()?;
    let mut x = start.to_vec();
    if provider.project(&mut x) {
        log::warn!("initial point projected into the parameter space");
    }
    let (mut value, mut grad) = provider.evaluate(&x)?;
    let mut history = vec![Iterate { k: 0, point: x.clone(), objective: value, step: 0.0 }];
    let backtrack = config.backtrack && provider.is_exact();
    let mut converged = false;
    for k in 1..=config.max_iter {
        let mut step = config.step_base * (k as f64).powf(-config.decay);
        let mut halvings = 0;
        let (cand, cand_value, cand_grad) = loop {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + step * gi).collect();
            if provider.project(&mut cand) {
                log::warn!("iterate {k} left the parameter space and was projected back");
            }
            let (v, g) = provider.evaluate(&cand)?;
            if !backtrack || v >= value || halvings == MAX_HALVINGS {
                break (cand, v, g);
            }
            step *= 0.5;
            halvings += 1;
        };
        let delta = cand.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = cand;
        value = cand_value;
        grad = cand_grad;
        history.push(Iterate { k, point: x.clone(), objective: value, step });
        if delta < config.tol {
            converged = true;
            break;
        }
    }
    Ok(AscentResult { estimate: x, history, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Concave quadratic `-(x - 3)²` restricted to `x ≥ 0`.
    struct Quadratic;

    impl GradientProvider for Quadratic {
        fn evaluate(&mut self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
            Ok((-(p[0] - 3.0).powi(2), vec![-2.0 * (p[0] - 3.0)]))
        }
        fn project(&self, p: &mut [f64]) -> bool {
            if p[0] < 0.0 {
                p[0] = 1e-6;
                true
            } else {
                false
            }
        }
        fn is_exact(&self) -> bool {
            true
        }
    }

    #[test]
    fn zero_iterations_return_start() {
        let cfg = AscentConfig { max_iter: 0, ..Default::default() };
        let r = gradient_ascent_ml(&mut Quadratic, &[0.5], &cfg).unwrap();
        assert_eq!(r.estimate, vec![0.5]);
        assert_eq!(r.history.len(), 1);
    }

    #[test]
    fn converges_with_backtracking_from_a_large_step() {
        let cfg = AscentConfig { step_base: 5.0, decay: 0.0, max_iter: 500, tol: 1e-12, backtrack: true };
        let r = gradient_ascent_ml(&mut Quadratic, &[0.5], &cfg).unwrap();
        assert!((r.estimate[0] - 3.0).abs() < 1e-9);
        assert!(r.converged);
        assert!(r.history.windows(2).all(|w| w[1].objective >= w[0].objective));
    }

    #[test]
    fn projection_keeps_iterates_feasible() {
        let mut neg = Quadratic;
        let cfg = AscentConfig { step_base: 10.0, decay: 0.0, max_iter: 3, tol: 0.0, backtrack: false };
        let r = gradient_ascent_ml(&mut neg, &[5.0], &cfg).unwrap();
        assert!(r.history.iter().all(|it| it.point[0] >= 0.0));
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = AscentConfig { step_base: -1.0, ..Default::default() };
        assert!(gradient_ascent_ml(&mut Quadratic, &[1.0], &cfg).is_err());
    }
}
