use super::*;
use crate::model::{log_joint, simulate, Lgss};
use crate::rng::seeded;

fn data(theta: f64, len: usize, seed: u64) -> Vec<f64> {
    simulate(&Lgss::default(), &LgssParams::new(theta), len, &mut seeded(seed)).unwrap().1
}

#[test]
fn empty_dataset() {
    let run = kalman_filter(&LgssParams::new(1.0), &[]).unwrap();
    assert_eq!(run.loglik, 0.0);
    assert!(run.is_empty());
    assert_eq!(kalman_gradient(&LgssParams::new(1.0), &[]).unwrap(), 0.0);
    assert!(rts_smoother(&LgssParams::new(1.0), &[]).is_err());
}

#[test]
fn single_step_prediction() {
    let p = LgssParams::new(1.0);
    let run = kalman_filter(&p, &[0.3]).unwrap();
    let s2 = 0.25 / 0.51 + 0.1;
    let expected = -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - 0.09 / (2.0 * s2);
    assert!((run.loglik - expected).abs() < 1e-14);
}

#[test]
fn innovation_identity_and_positivity() {
    let p = LgssParams::new(0.8);
    let run = kalman_filter(&p, &data(0.8, 50, 1)).unwrap();
    for t in 0..run.len() {
        assert!((run.innovation_var[t] - (0.25 * run.pred_var[t] + 0.1)).abs() < 1e-14);
        assert!(run.pred_var[t] > 0.0 && run.filt_var[t] > 0.0);
    }
}

#[test]
fn rejects_invalid_theta() {
    assert!(matches!(kalman_filter(&LgssParams::new(0.0), &[1.0]), Err(Error::Domain(_))));
}

#[test]
fn filter_is_a_pure_function_of_its_inputs() {
    let p = LgssParams::new(1.2);
    let mut y = data(1.0, 30, 2);
    let before = kalman_filter(&p, &y).unwrap();
    y.push(4.0);
    let _ = kalman_filter(&p, &y).unwrap();
    y.pop();
    assert_eq!(kalman_filter(&p, &y).unwrap(), before);
}

#[test]
fn appendix_recursions_for_unit_observation_coefficient() {
    // With c = 1 the gain reduces to 0.7·P/Λ and P_{t+1|t} = 0.49P + θ⁻¹ - 0.7KP.
    let p = LgssParams { c: 1.0, ..LgssParams::new(1.5) };
    let y = data(1.5, 20, 3);
    let run = kalman_filter(&p, &y).unwrap();
    for t in 0..y.len() - 1 {
        let (pp, l) = (run.pred_var[t], run.innovation_var[t]);
        assert!((l - (pp + 0.1)).abs() < 1e-14);
        let k = 0.7 * pp / l;
        assert!((run.gain[t] - k).abs() < 1e-14);
        let next = 0.49 * pp + 1.0 / 1.5 - 0.7 * k * pp;
        assert!((run.pred_var[t + 1] - next).abs() < 1e-13);
    }
}

#[test]
fn single_step_smoothing_equals_filtering() {
    let p = LgssParams::new(1.0);
    let run = kalman_filter(&p, &[0.7]).unwrap();
    let s = rts_smoother(&p, &[0.7]).unwrap();
    assert_eq!(s.mean, run.filt_mean);
    assert_eq!(s.var, run.filt_var);
    assert!(s.lag_one_cov.is_empty());
    let x = backward_sample(&p, &run, &mut seeded(0));
    assert_eq!(x.len(), 1);
}

#[test]
fn smoothing_reduces_variance() {
    let p = LgssParams::new(1.0);
    let y = data(1.0, 60, 4);
    let run = kalman_filter(&p, &y).unwrap();
    let s = smooth_from_filter(&p, &run).unwrap();
    for t in 0..y.len() {
        assert!(s.var[t] > 0.0 && s.var[t] <= run.filt_var[t] + 1e-15);
    }
}

#[test]
fn backward_sampler_density_is_the_exact_posterior() {
    // log p(x | y) - log q(x) must be constant: log p(x|y) = log p(x, y) - V.
    let p = LgssParams::new(0.9);
    let y = data(0.9, 40, 5);
    let run = kalman_filter(&p, &y).unwrap();
    let mut rng = seeded(6);
    let diffs: Vec<f64> = (0..200)
        .map(|_| {
            let x = backward_sample(&p, &run, &mut rng);
            log_joint(&Lgss::default(), &p, &x, &y).unwrap() - run.loglik - backward_logpdf(&p, &run, &x)
        })
        .collect();
    let m = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let v = diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / diffs.len() as f64;
    assert!(v < 1e-9, "log-weight variance {v}");
    assert!(m.abs() < 1e-8, "mean log-weight {m}");
}
