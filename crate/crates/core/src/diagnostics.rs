//! Weight and chain diagnostics.

use serde::Serialize;

/// Effective sample size `1 / Σ w_i²` of normalised weights.
pub fn weight_ess(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with divisor `n - 1`.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Integrated autocorrelation time `1 + 2 Σ_k ρ_k`, summing lags until the
/// first negative autocorrelation or `max_lag`. A constant chain gives `+∞`.
pub fn chain_iact(values: &[f64], max_lag: usize) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let m = mean(values);
    let centred: Vec<f64> = values.iter().map(|v| v - m).collect();
    let c0 = centred.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 <= 0.0 || !c0.is_finite() {
        return f64::INFINITY;
    }
    let mut tau = 1.0;
    for k in 1..=max_lag.min(n - 1) {
        let ck = centred[..n - k]
            .iter()
            .zip(&centred[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        let rho = ck / c0;
        if rho < 0.0 {
            break;
        }
        tau += 2.0 * rho;
    }
    tau
}

/// Default lag window for chain diagnostics.
pub fn default_max_lag(n: usize) -> usize {
    (n / 10).clamp(1, 2000)
}

/// Moments and mixing summary of one chain component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSummary {
    pub mean: f64,
    pub sd: f64,
    pub iact: f64,
    pub ess: f64,
    /// Monte Carlo standard error of the mean, `sd·√(iact / n)`.
    pub mcse: f64,
}

pub fn summarize(values: &[f64]) -> ChainSummary {
    let n = values.len() as f64;
    let mean = mean(values);
    let sd = variance(values).sqrt();
    let iact = chain_iact(values, default_max_lag(values.len()));
    ChainSummary { mean, sd, iact, ess: n / iact, mcse: sd * (iact / n).sqrt() }
}

/// Combined standard error `|m1 - m2| / √(se1² + se2²)` in units of SE.
pub fn z_score(a: &ChainSummary, b: &ChainSummary) -> f64 {
    (a.mean - b.mean).abs() / (a.mcse * a.mcse + b.mcse * b.mcse).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges; bin `i` is `[edges[i], edges[i+1])`, the
    /// last bin closed.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram over the sample range. `bins = None` picks the Freedman–Diaconis
/// width `2·IQR·n^{-1/3}`, capped at 1000 bins.
pub fn histogram(values: &[f64], bins: Option<usize>) -> Histogram {
    if values.is_empty() {
        return Histogram { edges: vec![0.0, 1.0], counts: vec![0] };
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if hi <= lo {
        return Histogram { edges: vec![lo - 0.5, lo + 0.5], counts: vec![values.len() as u64] };
    }
    let bins = bins.unwrap_or_else(|| {
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let width = 2.0 * iqr * (values.len() as f64).powf(-1.0 / 3.0);
        if width > 0.0 {
            (((hi - lo) / width).ceil() as usize).clamp(1, 1000)
        } else {
            ((values.len() as f64).sqrt().ceil() as usize).clamp(1, 1000)
        }
    });
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + i as f64 * width }).collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Histogram { edges, counts }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn ess_examples() {
        assert!((weight_ess(&[0.01; 100]) - 100.0).abs() < 1e-9);
        assert_eq!(weight_ess(&[0.0, 1.0, 0.0]), 1.0);
        assert_eq!(weight_ess(&[0.5, 0.5, 0.0, 0.0]), 2.0);
    }

    #[test]
    fn iact_of_iid_and_duplicated_chains() {
        let mut rng = seeded(9);
        let iid: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let tau = chain_iact(&iid, 1000);
        assert!((tau - 1.0).abs() < 0.1, "{tau}");
        let doubled: Vec<f64> = iid.iter().flat_map(|&v| [v, v]).collect();
        let tau = chain_iact(&doubled, 1000);
        assert!((tau - 2.0).abs() < 0.2, "{tau}");
        assert_eq!(chain_iact(&[3.0; 50], 10), f64::INFINITY);
    }

    #[test]
    fn histogram_counts_everything() {
        let mut rng = seeded(10);
        let v: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let h = histogram(&v, None);
        assert_eq!(h.total(), 5000);
        assert_eq!(h.edges.len(), h.counts.len() + 1);
        assert!(h.edges.windows(2).all(|e| e[1] > e[0]));
        let h = histogram(&v, Some(7));
        assert_eq!(h.counts.len(), 7);
        assert_eq!(histogram(&[2.0; 4], None).total(), 4);
    }

    #[test]
    fn summary_of_known_values() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(quantile(&[0.0, 10.0], 0.25), 2.5);
    }
}
