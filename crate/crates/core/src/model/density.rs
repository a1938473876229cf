use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Log-density of the Gamma distribution with shape `shape` and **rate** `rate`
/// (mean `shape / rate`).
///
/// Returns `-inf` for `x <= 0`; a nonpositive shape or rate is a domain error.
pub fn gamma_logpdf(x: f64, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) {
        return Err(Error::domain(format!(
            "gamma density needs positive shape and rate, got shape={shape}, rate={rate}"
        )));
    }
    if !(x > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - libm::lgamma(shape))
}

/// Gaussian log-density with the given mean and variance.
#[inline]
pub fn normal_logpdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + variance.ln() + d * d / variance)
}

/// Supremum of the Gaussian log-density with the given variance.
#[inline]
pub fn normal_log_peak(variance: f64) -> f64 {
    -0.5 * (2.0 * PI * variance).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        assert!((gamma_logpdf(1.0, 1.0, 1.0).unwrap() + 1.0).abs() < 1e-14);
        let expected = 2f64.ln() - 2.0;
        assert!((gamma_logpdf(2.0, 3.0, 1.0).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn gamma_support_and_domain() {
        assert_eq!(gamma_logpdf(0.0, 2.0, 1.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(gamma_logpdf(-1.0, 2.0, 1.0).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(gamma_logpdf(1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_logpdf(1.0, 1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gamma_vague_prior_normalises() {
        // Gam(0.01, 0.01) has an integrable x^{-0.99} spike at zero; integrate
        // in u = ln x where the integrand is smooth and decays on both sides.
        // Below u = -700, e^{-bx} = 1 to double precision and the tail
        // ∫ b^a e^{au} / Γ(a) du is added in closed form.
        let (lo, hi) = (-700.0_f64, 8.0_f64);
        let n = 400_000;
        let h = (hi - lo) / n as f64;
        let f = |u: f64| (gamma_logpdf(u.exp(), 0.01, 0.01).unwrap() + u).exp();
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        let tail = (0.01 * 0.01f64.ln() + 0.01 * lo - libm::lgamma(0.01)).exp() / 0.01;
        let integral = acc * h / 3.0 + tail;
        assert!((integral - 1.0).abs() < 1e-6, "integral = {integral}");
    }

    #[test]
    fn normal_matches_closed_form() {
        let v = normal_logpdf(0.3, 0.0, 0.25);
        let expected = -0.5 * (2.0 * PI * 0.25).ln() - 0.09 / 0.5;
        assert!((v - expected).abs() < 1e-14);
        assert!((normal_log_peak(0.25) - normal_logpdf(1.0, 1.0, 0.25)).abs() < 1e-14);
    }
}
