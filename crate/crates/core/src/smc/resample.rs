use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResamplingScheme {
    /// i.i.d. categorical draws.
    #[default]
    Multinomial,
    /// One uniform offset shared by an evenly spaced grid.
    Systematic,
    /// One uniform per grid cell.
    Stratified,
}

/// Draws `n` ancestor indices from normalised `weights`.
///
/// Every scheme is unbiased: index `j` receives `n·w_j` offspring in
/// expectation.
pub fn resample<R: Rng + ?Sized>(
    weights: &[f64],
    n: usize,
    scheme: ResamplingScheme,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::domain("resampling needs n >= 1"));
    }
    if weights.is_empty() {
        return Err(Error::domain("cannot resample from an empty weight vector"));
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::domain("weights must be finite and nonnegative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("weights sum to {sum}, expected 1")));
    }
    let mut out = Vec::with_capacity(n);
    let mut cum = Vec::with_capacity(weights.len());
    resample_into(weights, n, scheme, rng, &mut cum, &mut out);
    Ok(out)
}

/// Unchecked resampling into reusable buffers.
pub(crate) fn resample_into<R: Rng + ?Sized>(
    weights: &[f64],
    n: usize,
    scheme: ResamplingScheme,
    rng: &mut R,
    cum: &mut Vec<f64>,
    out: &mut Vec<usize>,
) {
    cum.clear();
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cum.push(acc);
    }
    // Division by the total pins the last entry at exactly 1.0.
    for c in cum.iter_mut() {
        *c /= acc;
    }
    out.clear();
    match scheme {
        ResamplingScheme::Multinomial => {
            for _ in 0..n {
                let u: f64 = rng.random();
                out.push(cum.partition_point(|&c| c <= u));
            }
        }
        ResamplingScheme::Systematic => {
            let u0: f64 = rng.random();
            walk_grid(cum, n, |k| (k as f64 + u0) / n as f64, out);
        }
        ResamplingScheme::Stratified => {
            let offsets: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            walk_grid(cum, n, |k| (k as f64 + offsets[k]) / n as f64, out);
        }
    }
}

fn walk_grid(cum: &[f64], n: usize, point: impl Fn(usize) -> f64, out: &mut Vec<usize>) {
    let mut j = 0;
    for k in 0..n {
        let u = point(k);
        while j + 1 < cum.len() && cum[j] <= u {
            j += 1;
        }
        out.push(j);
    }
}
