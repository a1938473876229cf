//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations on the linear-Gaussian model, each on a dataset
//! simulated from `(theta, len, seed)`:
//! - [`filter_demo`]: bootstrap filter against the exact Kalman filter,
//! - [`likelihood_curve`]: exact and particle log-likelihood over a θ grid,
//! - [`posterior_histogram`]: Gibbs or PGAS-Gibbs posterior of θ.

use smc_sysid::bayes::{gibbs_lgss, pgas_gibbs};
use smc_sysid::diagnostics::{histogram, summarize, weight_ess};
use smc_sysid::kalman::kalman_filter;
use smc_sysid::model::simulate;
use smc_sysid::rng::stream;
use smc_sysid::smc::{bootstrap_loglik, bootstrap_pf, filter_expectation, PfConfig};
use smc_sysid::{Lgss, LgssParams};
use wasm_bindgen::prelude::*;

const MAX_LEN: usize = 5_000;
const MAX_PARTICLES: usize = 20_000;
const MAX_ITERATIONS: usize = 200_000;

fn dataset(theta: f64, len: usize, seed: u64) -> Result<Vec<f64>, String> {
    if len == 0 || len > MAX_LEN {
        return Err(format!("length must lie in 1..={MAX_LEN}"));
    }
    let p = LgssParams::new(theta);
    let (_, y) = simulate(&Lgss::default(), &p, len, &mut stream(seed, "data", 0)).map_err(|e| e.to_string())?;
    Ok(y)
}

fn check_particles(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_PARTICLES {
        return Err(format!("particle count must lie in 1..={MAX_PARTICLES}"));
    }
    Ok(())
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct FilterDemo {
    y: Vec<f64>,
    kalman_mean: Vec<f64>,
    kalman_sd: Vec<f64>,
    pf_mean: Vec<f64>,
    ess: Vec<f64>,
    kalman_loglik: f64,
    pf_loglik: f64,
}

#[wasm_bindgen]
impl FilterDemo {
    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn kalman_mean(&self) -> Vec<f64> {
        self.kalman_mean.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn kalman_sd(&self) -> Vec<f64> {
        self.kalman_sd.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn pf_mean(&self) -> Vec<f64> {
        self.pf_mean.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn ess(&self) -> Vec<f64> {
        self.ess.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn kalman_loglik(&self) -> f64 {
        self.kalman_loglik
    }
    #[wasm_bindgen(getter)]
    pub fn pf_loglik(&self) -> f64 {
        self.pf_loglik
    }
}

pub fn run_filter_demo(theta: f64, len: usize, n: usize, seed: u64) -> Result<FilterDemo, String> {
    check_particles(n)?;
    let y = dataset(theta, len, seed)?;
    let p = LgssParams::new(theta);
    let kf = kalman_filter(&p, &y).map_err(|e| e.to_string())?;
    let ps = bootstrap_pf(&Lgss::default(), &p, &y, n, PfConfig::default(), &mut stream(seed, "filter", 0))
        .map_err(|e| e.to_string())?;
    Ok(FilterDemo {
        pf_mean: (0..y.len()).map(|t| filter_expectation(&ps, t, |x| x)).collect(),
        ess: ps.weights.iter().map(|w| weight_ess(w)).collect(),
        kalman_sd: kf.filt_var.iter().map(|v| v.sqrt()).collect(),
        kalman_mean: kf.filt_mean,
        kalman_loglik: kf.loglik,
        pf_loglik: ps.loglik,
        y,
    })
}

/// Bootstrap filter and Kalman filter on one simulated dataset.
#[wasm_bindgen]
pub fn filter_demo(theta: f64, len: usize, n: usize, seed: u64) -> Result<FilterDemo, JsError> {
    run_filter_demo(theta, len, n, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct LikelihoodCurve {
    grid: Vec<f64>,
    exact: Vec<f64>,
    estimate: Vec<f64>,
}

#[wasm_bindgen]
impl LikelihoodCurve {
    #[wasm_bindgen(getter)]
    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> Vec<f64> {
        self.estimate.clone()
    }
}

pub fn run_likelihood_curve(theta: f64, len: usize, n: usize, seed: u64, lo: f64, hi: f64, points: usize) -> Result<LikelihoodCurve, String> {
    check_particles(n)?;
    if !(lo > 0.0 && hi > lo) || !(2..=400).contains(&points) {
        return Err("grid needs 0 < lo < hi and 2..=400 points".into());
    }
    let y = dataset(theta, len, seed)?;
    let grid: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let mut exact = Vec::with_capacity(points);
    let mut estimate = Vec::with_capacity(points);
    for (i, &g) in grid.iter().enumerate() {
        let p = LgssParams::new(g);
        exact.push(kalman_filter(&p, &y).map_err(|e| e.to_string())?.loglik);
        let mut rng = stream(seed, "curve", i as u64);
        estimate.push(bootstrap_loglik(&Lgss::default(), &p, &y, n, PfConfig::default(), &mut rng).unwrap_or(f64::NEG_INFINITY));
    }
    Ok(LikelihoodCurve { grid, exact, estimate })
}

/// Exact and particle-filter log-likelihood of θ on a grid.
#[wasm_bindgen]
pub fn likelihood_curve(theta: f64, len: usize, n: usize, seed: u64, lo: f64, hi: f64, points: usize) -> Result<LikelihoodCurve, JsError> {
    run_likelihood_curve(theta, len, n, seed, lo, hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Posterior {
    edges: Vec<f64>,
    counts: Vec<f64>,
    trace: Vec<f64>,
    mean: f64,
    sd: f64,
    ess: f64,
}

#[wasm_bindgen]
impl Posterior {
    #[wasm_bindgen(getter)]
    pub fn edges(&self) -> Vec<f64> {
        self.edges.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn counts(&self) -> Vec<f64> {
        self.counts.clone()
    }
    /// Full chain including burn-in.
    #[wasm_bindgen(getter)]
    pub fn trace(&self) -> Vec<f64> {
        self.trace.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> f64 {
        self.mean
    }
    #[wasm_bindgen(getter)]
    pub fn sd(&self) -> f64 {
        self.sd
    }
    #[wasm_bindgen(getter)]
    pub fn ess(&self) -> f64 {
        self.ess
    }
}

/// `sampler` is `"gibbs"` (exact state draws) or `"pgas"` (PGAS kernel with
/// `n` particles).
#[allow(clippy::too_many_arguments)]
pub fn run_posterior(
    sampler: &str,
    theta: f64,
    len: usize,
    seed: u64,
    n: usize,
    iterations: usize,
    burn_in: usize,
    bins: usize,
) -> Result<Posterior, String> {
    if iterations == 0 || iterations > MAX_ITERATIONS || burn_in >= iterations {
        return Err(format!("need 0 <= burn_in < iterations <= {MAX_ITERATIONS}"));
    }
    let y = dataset(theta, len, seed)?;
    let model = Lgss::default();
    let start = LgssParams::new(theta);
    let mut rng = stream(seed, "chain", 0);
    let out = match sampler {
        "gibbs" => gibbs_lgss(&model, &start, &y, iterations, burn_in, false, &mut rng),
        "pgas" => {
            check_particles(n)?;
            pgas_gibbs(&model, &start, &y, None, n, iterations, burn_in, false, &mut rng)
        }
        other => return Err(format!("unknown sampler `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    let kept = out.chain.kept(0);
    let h = histogram(&kept, (bins > 0).then_some(bins));
    let s = summarize(&kept);
    Ok(Posterior {
        edges: h.edges,
        counts: h.counts.iter().map(|&c| c as f64).collect(),
        trace: out.chain.column(0),
        mean: s.mean,
        sd: s.sd,
        ess: s.ess,
    })
}

/// Posterior histogram of θ; `bins = 0` picks Freedman–Diaconis.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn posterior_histogram(
    sampler: &str,
    theta: f64,
    len: usize,
    seed: u64,
    n: usize,
    iterations: usize,
    burn_in: usize,
    bins: usize,
) -> Result<Posterior, JsError> {
    run_posterior(sampler, theta, len, seed, n, iterations, burn_in, bins).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_demo_tracks_kalman() {
        let d = run_filter_demo(1.0, 50, 2000, 3).unwrap();
        assert_eq!(d.pf_mean.len(), 50);
        let worst = d
            .pf_mean
            .iter()
            .zip(&d.kalman_mean)
            .zip(&d.kalman_sd)
            .map(|((a, b), s)| (a - b).abs() / s)
            .fold(0.0, f64::max);
        assert!(worst < 0.5, "{worst}");
        assert!((d.pf_loglik - d.kalman_loglik).abs() < 1.0);
        assert!(d.ess.iter().all(|&e| (1.0..=2000.0).contains(&e)));
    }

    #[test]
    fn likelihood_curve_peaks_near_the_exact_maximum() {
        let c = run_likelihood_curve(1.0, 100, 500, 5, 0.2, 3.0, 15).unwrap();
        let argmax = |v: &[f64]| (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap();
        assert!(argmax(&c.exact).abs_diff(argmax(&c.estimate)) <= 2);
        assert!(run_likelihood_curve(1.0, 10, 10, 5, 2.0, 1.0, 5).is_err());
    }

    #[test]
    fn posterior_counts_match_kept_draws() {
        let post = run_posterior("gibbs", 1.0, 50, 9, 0, 2000, 500, 20).unwrap();
        assert_eq!(post.counts.iter().sum::<f64>(), 1501.0);
        assert_eq!(post.trace.len(), 2001);
        assert_eq!(post.edges.len(), 21);
        let pg = run_posterior("pgas", 1.0, 50, 9, 5, 2000, 500, 0).unwrap();
        assert!((pg.mean - post.mean).abs() < 0.5);
        assert!(run_posterior("nuts", 1.0, 50, 9, 5, 10, 1, 0).is_err());
    }
}
