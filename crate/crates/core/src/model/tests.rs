use proptest::prelude::*;

use super::*;
use crate::rng::seeded;

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, s)
}

#[test]
fn simulate_empty() {
    let (x, y) = simulate(&Lgss::default(), &LgssParams::new(1.0), 0, &mut seeded(1)).unwrap();
    assert!(x.is_empty() && y.is_empty());
}

#[test]
fn simulate_rejects_bad_params() {
    let err = simulate(&Lgss::default(), &LgssParams::new(-1.0), 5, &mut seeded(1));
    assert!(matches!(err, Err(Error::Domain(_))));
    let err = simulate(&Varve::default(), &VarveParams::new(1.0, 1.0), 5, &mut seeded(1));
    assert!(matches!(err, Err(Error::Domain(_))));
}

#[test]
fn lgss_stationary_variance() {
    let n = 100_000;
    let (x, _) = simulate(&Lgss::default(), &LgssParams::new(1.0), n, &mut seeded(2)).unwrap();
    let (_, var) = mean_var(&x);
    let target = 1.0 / 0.51;
    // AR(1) sample variance: Var(s²) ≈ 2σ⁴(1 + a²)/(n(1 - a²)).
    let se = (2.0 * target * target * (1.0 + 0.49) / (n as f64 * 0.51)).sqrt();
    assert!((var - target).abs() < 3.0 * se, "var {var} vs {target} (se {se})");
}

#[test]
fn varve_white_noise_states() {
    let n = 100_000;
    let (x, _) = simulate(&Varve::default(), &VarveParams::new(0.0, 4.0), n, &mut seeded(3)).unwrap();
    let (_, var) = mean_var(&x);
    let se = (2.0 * 0.25f64.powi(2) / n as f64).sqrt();
    assert!((var - 0.25).abs() < 3.0 * se, "var {var}");
}

#[test]
fn varve_observation_uses_rate() {
    let model = Varve::default();
    let p = VarveParams::new(0.5, 10.0);
    let x = 0.4;
    let mut rng = seeded(4);
    let draws: Vec<f64> = (0..100_000).map(|_| model.sample_observation(&p, x, 0, &mut rng)).collect();
    let (m, _) = mean_var(&draws);
    let rate = 0.256 * (-x).exp();
    let mean = 6.25 / rate;
    let se = (6.25 / (rate * rate) / 1e5).sqrt();
    assert!((m - mean).abs() < 3.0 * se, "mean {m} vs {mean}");
}

#[test]
fn batch_observation_matches_scalar() {
    let model = Varve::default();
    let p = VarveParams::new(0.9, 30.0);
    let xs = [-1.0, -0.2, 0.0, 0.7, 2.5];
    let mut out = [0.0; 5];
    model.observation_logpdf_batch(&p, &xs, 17.3, 0, &mut out);
    for (o, &x) in out.iter().zip(&xs) {
        let direct = gamma_logpdf(17.3, 6.25, 0.256 * (-x).exp()).unwrap();
        assert!((o - direct).abs() < 1e-10);
        assert!((model.observation_logpdf(&p, x, 17.3, 0) - direct).abs() < 1e-10);
    }
}

#[test]
fn log_joint_single_step() {
    let model = Lgss::default();
    let p = LgssParams::new(1.3);
    let v = log_joint(&model, &p, &[0.4], &[0.1]).unwrap();
    let expected = model.initial_logpdf(&p, 0.4) + model.observation_logpdf(&p, 0.4, 0.1, 0);
    assert_eq!(v, expected);
}

#[test]
fn log_joint_lgss_term_by_term() {
    let p = LgssParams::new(2.0);
    let x = [0.3, -0.5, 1.1];
    let y = [0.2, 0.0, 0.9];
    let gauss = |v: f64, m: f64, s2: f64| {
        -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - (v - m).powi(2) / (2.0 * s2)
    };
    let expected = gauss(x[0], 0.0, 1.0 / (0.51 * 2.0))
        + gauss(y[0], 0.5 * x[0], 0.1)
        + gauss(y[1], 0.5 * x[1], 0.1)
        + gauss(y[2], 0.5 * x[2], 0.1)
        + gauss(x[1], 0.7 * x[0], 0.5)
        + gauss(x[2], 0.7 * x[1], 0.5);
    let v = log_joint(&Lgss::default(), &p, &x, &y).unwrap();
    assert!((v - expected).abs() < 1e-12);
}

#[test]
fn log_joint_varve_symbolic_expansion() {
    // θ-dependent part: ½{log((1-φ²)τ) - (1-φ²)τx₁² + Σ(log τ - τ(x_{t+1} - φx_t)²)}
    // plus -T/2·log 2π and the θ-free Gamma observation terms.
    let (phi, tau): (f64, f64) = (0.8, 12.0);
    let x = [0.2, -0.1, 0.35];
    let y = [14.0, 30.5, 22.0];
    let mut complete = (1.0 - phi * phi) * tau;
    complete = complete.ln() - (1.0 - phi * phi) * tau * x[0] * x[0];
    for t in 0..2 {
        complete += tau.ln() - tau * (x[t + 1] - phi * x[t]).powi(2);
    }
    complete *= 0.5;
    let consts = -1.5 * (2.0 * std::f64::consts::PI).ln();
    let obs: f64 = x
        .iter()
        .zip(&y)
        .map(|(&xi, &yi)| gamma_logpdf(yi, 6.25, 0.256 * (-xi).exp()).unwrap())
        .sum();
    let v = log_joint(&Varve::default(), &VarveParams::new(phi, tau), &x, &y).unwrap();
    assert!((v - (complete + consts + obs)).abs() < 1e-12);
}

#[test]
fn log_joint_length_mismatch() {
    let r = log_joint(&Lgss::default(), &LgssParams::new(1.0), &[0.0, 1.0], &[0.0]);
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn stationary_initial_examples() {
    let (m, v) = LgssParams::new(1.0).stationary().unwrap();
    assert_eq!(m, 0.0);
    assert!((v - 1.0 / 0.51).abs() < 1e-14);
    let (_, v) = VarveParams::new(0.0, 1.0).stationary().unwrap();
    assert_eq!(v, 1.0);
    let (_, v) = VarveParams::new(0.95, 50.0).stationary().unwrap();
    assert!((v - 1.0 / (0.0975 * 50.0)).abs() < 1e-12);
    assert!((v - 0.2051).abs() < 1e-4);
    assert!(matches!(stationary_initial(1.0, 1.0), Err(Error::Domain(_))));
    assert!(matches!(stationary_initial(-1.2, 1.0), Err(Error::Domain(_))));
}

fn transition_mass<M: StateSpaceModel>(model: &M, p: &M::Params, from: f64) -> f64 {
    let (lo, hi, n) = (from - 20.0, from + 20.0, 200_000);
    let h = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * model.transition_logpdf(p, from, lo + i as f64 * h, 0).exp()
        })
        .sum::<f64>()
        * h
}

#[test]
fn transition_densities_integrate_to_one() {
    for from in [-2.0, 0.0, 1.5] {
        let m = transition_mass(&Lgss::default(), &LgssParams::new(0.7), from);
        assert!((m - 1.0).abs() < 1e-4);
        let m = transition_mass(&Varve::default(), &VarveParams::new(0.9, 3.0), from);
        assert!((m - 1.0).abs() < 1e-4);
    }
}

#[test]
fn transition_bound_dominates() {
    let model = Varve::default();
    let p = VarveParams::new(0.9, 40.0);
    let bound = model.transition_log_bound(&p).unwrap();
    for to in [-1.0, 0.0, 0.45, 0.9, 3.0] {
        assert!(model.transition_logpdf(&p, 0.5, to, 0) <= bound + 1e-12);
    }
    assert!((model.transition_logpdf(&p, 0.5, 0.45, 0) - bound).abs() < 1e-12);
}

#[test]
fn priors() {
    let lg = Lgss::default();
    assert!((lg.log_prior(&LgssParams::new(2.0)) - gamma_logpdf(2.0, 0.01, 0.01).unwrap()).abs() < 1e-14);
    let v = Varve::default();
    assert_eq!(v.log_prior(&VarveParams::new(1.0, 2.0)), f64::NEG_INFINITY);
    assert!(v.log_prior(&VarveParams::new(0.5, 2.0)).is_finite());
}

#[test]
fn param_vector_roundtrip() {
    let lg = Lgss::default();
    let base = LgssParams { theta: 1.0, a: 0.6, c: 1.0, r: 0.2 };
    let p = lg.with_param_vector(&base, &[3.0]).unwrap();
    assert_eq!(p, LgssParams { theta: 3.0, ..base });
    assert!(lg.with_param_vector(&base, &[-3.0]).is_err());
    assert!(lg.with_param_vector(&base, &[1.0, 2.0]).is_err());
    let v = Varve::default();
    let p = v.with_param_vector(&VarveParams::new(0.1, 1.0), &[0.9, 40.0]).unwrap();
    assert_eq!(v.param_vector(&p), vec![0.9, 40.0]);
}

#[test]
fn dataset_parsing() {
    let d = Dataset::parse("# header\n1.5\n\n-2\n3e-1\n", "t").unwrap();
    assert_eq!(d.y, vec![1.5, -2.0, 0.3]);
    let d = Dataset::parse("", "empty").unwrap();
    assert_eq!(d.len(), 0);
    match Dataset::parse("1.0\n2.0\nabc\n", "bad") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    // '#' is only a header on the first line
    assert!(matches!(Dataset::parse("1\n# x\n", "bad"), Err(Error::Parse { line: 2, .. })));
    let varve = Dataset::varve();
    assert_eq!(varve.len(), 634);
    assert!(varve.y.iter().all(|&v| v > 0.0));
    let again = Dataset::parse(&varve.to_text(), "ice-varve").unwrap();
    assert_eq!(again, varve);
}

proptest! {
    #[test]
    fn simulate_then_log_joint_is_never_nan(
        theta in 0.05f64..20.0,
        phi in -0.99f64..0.99,
        tau in 0.5f64..200.0,
        seed in any::<u64>(),
        len in 1usize..40,
    ) {
        let mut rng = seeded(seed);
        let lp = LgssParams::new(theta);
        let (x, y) = simulate(&Lgss::default(), &lp, len, &mut rng).unwrap();
        prop_assert!(!log_joint(&Lgss::default(), &lp, &x, &y).unwrap().is_nan());
        let vp = VarveParams::new(phi, tau);
        let (x, y) = simulate(&Varve::default(), &vp, len, &mut rng).unwrap();
        prop_assert!(!log_joint(&Varve::default(), &vp, &x, &y).unwrap().is_nan());
    }
}
