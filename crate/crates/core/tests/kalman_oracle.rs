mod common;

use common::{dense_loglik, dense_posterior, lgss_data, mean_se};
use rand::Rng;
use smc_sysid::kalman::{backward_logpdf, backward_sample, kalman_filter, kalman_gradient, rts_smoother};
use smc_sysid::model::log_joint;
use smc_sysid::rng::seeded;
use smc_sysid::{Lgss, LgssParams};

#[test]
fn filter_matches_dense_gaussian() {
    for (theta, c) in [(1.0, 0.5), (0.4, 1.0), (3.0, 0.5)] {
        let p = LgssParams { c, ..LgssParams::new(theta) };
        let y = lgss_data(1.0, 10, 7);
        let v = kalman_filter(&p, &y).unwrap().loglik;
        assert!((v - dense_loglik(&p, &y)).abs() < 1e-9);
    }
}

#[test]
fn single_step_prediction() {
    let p = LgssParams::new(1.0);
    let v = kalman_filter(&p, &[0.3]).unwrap().loglik;
    let s2 = 0.25 / 0.51 + 0.1;
    let expected = -0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + 0.09 / s2);
    assert!((v - expected).abs() < 1e-14);
}

#[test]
fn smoother_matches_dense_conditioning() {
    let p = LgssParams::new(1.0);
    let y = lgss_data(1.0, 10, 8);
    let sm = rts_smoother(&p, &y).unwrap();
    let (mean, cov) = dense_posterior(&p, &y);
    let run = kalman_filter(&p, &y).unwrap();
    for t in 0..10 {
        assert!((sm.mean[t] - mean[t]).abs() < 1e-9);
        assert!((sm.var[t] - cov[(t, t)]).abs() < 1e-9);
        assert!(sm.var[t] <= run.filt_var[t] + 1e-15);
    }
    for t in 0..9 {
        assert!((sm.lag_one_cov[t] - cov[(t + 1, t)]).abs() < 1e-9);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = seeded(99);
    for i in 0..20 {
        let theta = 0.2 + 4.0 * rng.random::<f64>();
        let len = 20 + (rng.random::<f64>() * 100.0) as usize;
        let y = lgss_data(theta, len, 1000 + i);
        let p = LgssParams::new(theta);
        let g = kalman_gradient(&p, &y).unwrap();
        let h = 1e-5;
        let fd = (kalman_filter(&p.with_theta(theta + h), &y).unwrap().loglik
            - kalman_filter(&p.with_theta(theta - h), &y).unwrap().loglik)
            / (2.0 * h);
        assert!((g - fd).abs() < 1e-5 * fd.abs().max(1e-3), "θ={theta}: {g} vs {fd}");
    }
}

#[test]
fn gradient_root_is_a_maximum() {
    let y = lgss_data(1.0, 100, 3);
    let grad = |t: f64| kalman_gradient(&LgssParams::new(t), &y).unwrap();
    let (mut lo, mut hi) = (0.05, 50.0);
    assert!(grad(lo) > 0.0 && grad(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if grad(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let star = 0.5 * (lo + hi);
    assert!(grad(star).abs() < 1e-10);
    let v = |t: f64| kalman_filter(&LgssParams::new(t), &y).unwrap().loglik;
    assert!(v(star + 0.01) < v(star) && v(star - 0.01) < v(star));
}

#[test]
fn empty_data_has_zero_gradient() {
    assert_eq!(kalman_gradient(&LgssParams::new(2.0), &[]).unwrap(), 0.0);
}

#[test]
fn appending_then_removing_is_pure() {
    let p = LgssParams::new(1.0);
    let y = lgss_data(1.0, 30, 4);
    let v = kalman_filter(&p, &y).unwrap().loglik;
    let mut longer = y.clone();
    longer.extend([0.5, -0.2]);
    kalman_filter(&p, &longer).unwrap();
    longer.truncate(30);
    assert_eq!(kalman_filter(&p, &longer).unwrap().loglik, v);
}

#[test]
fn backward_samples_reproduce_smoothed_moments() {
    let p = LgssParams::new(1.0);
    let y = lgss_data(1.0, 10, 5);
    let run = kalman_filter(&p, &y).unwrap();
    let sm = rts_smoother(&p, &y).unwrap();
    let mut rng = seeded(6);
    let n = 100_000;
    let draws: Vec<Vec<f64>> = (0..n).map(|_| backward_sample(&p, &run, &mut rng)).collect();
    for t in 0..10 {
        let col: Vec<f64> = draws.iter().map(|d| d[t]).collect();
        let (m, se) = mean_se(&col);
        assert!((m - sm.mean[t]).abs() < 3.0 * se, "t={t}");
    }
    for t in 0..9 {
        let prod: Vec<f64> = draws
            .iter()
            .map(|d| (d[t + 1] - sm.mean[t + 1]) * (d[t] - sm.mean[t]))
            .collect();
        let (m, se) = mean_se(&prod);
        assert!((m - sm.lag_one_cov[t]).abs() < 3.0 * se, "t={t}");
    }
}

#[test]
fn backward_sampler_is_the_exact_posterior() {
    // log p(x, y) - log q(x) = log p(y) for every draw of an exact sampler.
    let p = LgssParams::new(1.3);
    let y = lgss_data(1.3, 40, 9);
    let run = kalman_filter(&p, &y).unwrap();
    let mut rng = seeded(10);
    let w: Vec<f64> = (0..200)
        .map(|_| {
            let x = backward_sample(&p, &run, &mut rng);
            log_joint(&Lgss::default(), &p, &x, &y).unwrap() - backward_logpdf(&p, &run, &x)
        })
        .collect();
    let (m, _) = mean_se(&w);
    let var = w.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / w.len() as f64;
    assert!(var < 1e-9);
    assert!((m - run.loglik).abs() < 1e-8);
}
