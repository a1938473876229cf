//! Experiment execution.
//!
//! Randomness is derived from the master seed with
//! [`smc_sysid::rng::stream`]: component `"data"` simulates the dataset,
//! `"algorithm"` drives single-run estimators and filters, `"chain"` with
//! index `r` drives MCMC chain `r`, and `"pilot"` with index `r` its pilot
//! run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Instant;

use serde::Serialize;
use smc_sysid::bayes::{self, ConjugateModel, MhSettings, ParameterChain, RandomWalkProposal};
use smc_sysid::diagnostics::{self, histogram, weight_ess};
use smc_sysid::kalman::rts_smoother;
use smc_sysid::ml::{self, AscentConfig, EmModel, KalmanScore, ParticleScore, PsaemConfig, PsemConfig, ScoreModel};
use smc_sysid::model::simulate;
use smc_sysid::rng::{self, SimRng};
use smc_sysid::smc::{bootstrap_pf, ffbsi, filter_expectation, BackwardMode, PfConfig, ResamplingScheme};
use smc_sysid::{Dataset, Lgss, LgssParams, StateSpaceModel};

use crate::config::{AlgorithmConfig, DataConfig, ExperimentConfig, ModelSetup};
use crate::output::{floats, posterior_summary, Artifacts, PosteriorSummary};
use crate::CliError;

/// Run-time options that are not part of the experiment definition.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub chains: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// The effective configuration; running it again reproduces the outputs.
    pub config: String,
    pub wall_time_secs: f64,
    /// Terminal estimate of an optimisation algorithm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior: Option<PosteriorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loglik: Option<f64>,
    /// Per-step effective sample size of a filter run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess_trajectory: Option<Vec<f64>>,
    pub artifacts: Vec<PathBuf>,
}

/// Deterministic part of a run, written to `summary.json`.
#[derive(Debug, Clone, Default, Serialize)]
struct Summary {
    algorithm: String,
    model: String,
    seed: u64,
    data_length: usize,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    posterior: Option<PosteriorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimate: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loglik: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_ess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_ess: Option<f64>,
}

/// Loads or simulates the dataset named by `cfg`. Returns the data and, when
/// simulated, the latent states.
pub fn load_data(cfg: &ExperimentConfig) -> Result<(Dataset, Option<Vec<f64>>), CliError> {
    let invalid = |e: smc_sysid::Error| CliError::Validation(format!("[data]: {e}"));
    match &cfg.data {
        DataConfig::File { path } => Ok((Dataset::from_path(path).map_err(invalid)?, None)),
        DataConfig::BundledVarve {} => Ok((Dataset::varve(), None)),
        DataConfig::Simulate { length, theta, phi, tau, seed } => {
            let mut rng = match seed {
                Some(s) => rng::seeded(*s),
                None => rng::stream(cfg.seed, "data", 0),
            };
            let (x, y) = match cfg.setup()? {
                ModelSetup::Lgss(m, p) => {
                    let p = p.with_theta(theta.unwrap_or(p.theta));
                    let (x, y) = simulate(&m, &p, *length, &mut rng).map_err(invalid)?;
                    (x, Dataset::new(y, format!("simulated lgss theta={}", p.theta)).map_err(invalid)?)
                }
                ModelSetup::Varve(m, p) => {
                    let p = smc_sysid::VarveParams::new(phi.unwrap_or(p.phi), tau.unwrap_or(p.tau));
                    let (x, y) = simulate(&m, &p, *length, &mut rng).map_err(invalid)?;
                    (x, Dataset::new(y, format!("simulated varve phi={} tau={}", p.phi, p.tau)).map_err(invalid)?)
                }
            };
            Ok((y, Some(x)))
        }
    }
}

/// Writes `data.txt` and `states.csv` for a simulated dataset.
pub fn simulate_to(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !matches!(cfg.data, DataConfig::Simulate { .. }) {
        return Err(CliError::Validation("`simulate` needs [data] source = \"simulate\"".into()));
    }
    let (data, states) = load_data(cfg)?;
    let states = states.expect("simulated data has states");
    let mut art = Artifacts::new(out)?;
    art.text("data.txt", &data.to_text())?;
    let rows = states.iter().zip(&data.y).enumerate().map(|(t, (x, y))| vec![t.to_string(), x.to_string(), y.to_string()]);
    art.csv("states.csv", &["t", "x", "y"].map(String::from), rows)?;
    Ok(art.paths)
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    if opts.chains == 0 {
        return Err(CliError::Validation("--chains must be >= 1".into()));
    }
    if opts.chains > 1 && !cfg.algorithm.is_mcmc() {
        return Err(CliError::Validation(format!(
            "--chains applies to MCMC algorithms, not `{}`",
            cfg.algorithm.id()
        )));
    }
    let (data, _) = load_data(cfg)?;
    let setup = cfg.setup()?;
    if data.is_empty() && !matches!(cfg.algorithm, AlgorithmConfig::Mh { .. } | AlgorithmConfig::Pmh { .. }) {
        return Err(CliError::Validation(format!("algorithm `{}` needs at least one observation", cfg.algorithm.id())));
    }

    let mut art = Artifacts::new(&opts.out)?;
    art.text("config.toml", &cfg.to_toml())?;
    if matches!(cfg.data, DataConfig::Simulate { .. }) {
        art.text("data.txt", &data.to_text())?;
    }
    let mut summary = Summary {
        algorithm: cfg.algorithm.id().into(),
        model: cfg.model.id().into(),
        seed: cfg.seed,
        data_length: data.len(),
        ..Summary::default()
    };
    let mut ess_trajectory = None;
    let names = cfg.model.param_names();
    let wrap = |e: smc_sysid::Error| CliError::Run { context: format!("{} on {}", cfg.algorithm.id(), cfg.model.id()), source: e };

    if cfg.algorithm.is_mcmc() {
        let chains: Vec<ParameterChain> = match &setup {
            ModelSetup::Lgss(m, p) => run_chains(cfg, opts.chains, m, p, &data.y),
            ModelSetup::Varve(m, p) => run_chains(cfg, opts.chains, m, p, &data.y),
        }
        .map_err(wrap)?;
        if chains.len() == 1 {
            art.chain("chain.csv", &chains[0])?;
        } else {
            for (r, c) in chains.iter().enumerate() {
                art.chain(&format!("chain_{r}.csv"), c)?;
            }
        }
        for (j, name) in names.iter().enumerate() {
            let pooled: Vec<f64> = chains.iter().flat_map(|c| c.kept(j)).collect();
            art.histogram(name, &histogram(&pooled, cfg.output.histogram_bins))?;
        }
        summary.posterior = Some(posterior_summary(&chains));
    } else {
        let mut rng = rng::stream(cfg.seed, "algorithm", 0);
        match &cfg.algorithm {
            AlgorithmConfig::DoMl { .. } | AlgorithmConfig::Em { .. } | AlgorithmConfig::Psem { .. } | AlgorithmConfig::Psaem { .. } => {
                let fit = match &setup {
                    ModelSetup::Lgss(m, p) => estimate(cfg, m, p, &data.y, &mut rng),
                    ModelSetup::Varve(m, p) => estimate(cfg, m, p, &data.y, &mut rng),
                }
                .map_err(wrap)?;
                let mut header = vec!["k".to_string()];
                header.extend(names.iter().map(|s| s.to_string()));
                header.push("objective".into());
                header.push("step".into());
                let rows = fit.rows.iter().map(|r| {
                    let mut row = vec![r.k.to_string()];
                    row.extend(floats(&r.params));
                    row.push(r.objective.to_string());
                    row.push(r.step.map_or_else(String::new, |s| s.to_string()));
                    row
                });
                art.csv("iterates.csv", &header, rows)?;
                summary.estimate = Some(named(names, &fit.estimate));
                summary.iterations = Some(fit.rows.len() - 1);
                summary.converged = fit.converged;
                summary.loglik = fit.rows.last().map(|r| r.objective);
            }
            AlgorithmConfig::PfOnly { n, scheme, ess_threshold } => {
                let pf = PfConfig { scheme: *scheme, ess_threshold: *ess_threshold };
                let ps = match &setup {
                    ModelSetup::Lgss(m, p) => bootstrap_pf(m, p, &data.y, *n, pf, &mut rng),
                    ModelSetup::Varve(m, p) => bootstrap_pf(m, p, &data.y, *n, pf, &mut rng),
                }
                .map_err(wrap)?;
                let mut trace = Vec::new();
                ps.write_trace(&mut trace).map_err(|e| CliError::Io(e.to_string()))?;
                art.text("trace.csv", &String::from_utf8(trace).expect("trace is ascii"))?;
                let ess: Vec<f64> = ps.weights.iter().map(|w| weight_ess(w)).collect();
                let rows = (0..ps.len()).map(|t| {
                    let mean = filter_expectation(&ps, t, |x| x);
                    let var = filter_expectation(&ps, t, |x| (x - mean) * (x - mean));
                    vec![t.to_string(), mean.to_string(), var.to_string(), ess[t].to_string()]
                });
                art.csv("filter.csv", &["t", "mean", "var", "ess"].map(String::from), rows)?;
                summary.loglik = Some(ps.loglik);
                summary.mean_ess = Some(diagnostics::mean(&ess));
                summary.min_ess = ess.iter().copied().reduce(f64::min);
                ess_trajectory = Some(ess);
            }
            AlgorithmConfig::SmoothOnly { n, m, mode } => {
                let (mean, var) = match (&setup, n, m) {
                    (ModelSetup::Lgss(_, p), None, None) => {
                        let sm = rts_smoother(p, &data.y).map_err(wrap)?;
                        (sm.mean, sm.var)
                    }
                    (ModelSetup::Lgss(model, p), Some(n), Some(m)) => particle_smoother(model, p, &data.y, *n, *m, *mode, &mut rng).map_err(wrap)?,
                    (ModelSetup::Varve(model, p), Some(n), Some(m)) => particle_smoother(model, p, &data.y, *n, *m, *mode, &mut rng).map_err(wrap)?,
                    _ => unreachable!("validated"),
                };
                let rows = (0..mean.len()).map(|t| vec![t.to_string(), mean[t].to_string(), var[t].to_string()]);
                art.csv("smoothed.csv", &["t", "mean", "var"].map(String::from), rows)?;
            }
            _ => unreachable!("MCMC handled above"),
        }
    }
    art.json("summary.json", &summary)?;

    Ok(RunReport {
        config: cfg.to_toml(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        estimate: summary.estimate,
        posterior: summary.posterior,
        loglik: summary.loglik,
        ess_trajectory,
        artifacts: art.paths,
    })
}

fn named(names: &[&str], values: &[f64]) -> BTreeMap<String, f64> {
    names.iter().map(|s| s.to_string()).zip(values.iter().copied()).collect()
}

/// Model operations the runner needs, available for both models.
pub trait RunnableModel: ScoreModel + EmModel + ConjugateModel + Send {
    /// The linear-Gaussian specialisation, for Kalman-based algorithms.
    fn as_lgss(&self, params: &Self::Params) -> Option<(Lgss, LgssParams)>;
}

impl RunnableModel for Lgss {
    fn as_lgss(&self, params: &LgssParams) -> Option<(Lgss, LgssParams)> {
        Some((*self, *params))
    }
}

impl RunnableModel for smc_sysid::Varve {
    fn as_lgss(&self, _: &smc_sysid::VarveParams) -> Option<(Lgss, LgssParams)> {
        None
    }
}

fn run_chains<M: RunnableModel>(
    cfg: &ExperimentConfig,
    count: usize,
    model: &M,
    start: &M::Params,
    y: &[f64],
) -> Result<Vec<ParameterChain>, smc_sysid::Error> {
    if count == 1 {
        return Ok(vec![run_chain(cfg, 0, model, start, y)?]);
    }
    thread::scope(|s| {
        let handles: Vec<_> = (0..count).map(|r| s.spawn(move || run_chain(cfg, r, model, start, y))).collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    })
}

fn run_chain<M: RunnableModel>(
    cfg: &ExperimentConfig,
    r: usize,
    model: &M,
    start: &M::Params,
    y: &[f64],
) -> Result<ParameterChain, smc_sysid::Error> {
    let mut rng = rng::stream(cfg.seed, "chain", r as u64);
    match &cfg.algorithm {
        AlgorithmConfig::Mh { iterations, burn_in, proposal_var } => {
            let (lgss, p) = model.as_lgss(start).expect("validated");
            let prop = RandomWalkProposal::scalar(*proposal_var)?;
            bayes::mh_exact(&lgss, &p, y, &prop, &MhSettings::new(*iterations, *burn_in), &mut rng)
        }
        AlgorithmConfig::Gibbs { iterations, burn_in } => {
            let (lgss, p) = model.as_lgss(start).expect("validated");
            Ok(bayes::gibbs_lgss(&lgss, &p, y, *iterations, *burn_in, false, &mut rng)?.chain)
        }
        AlgorithmConfig::PgasGibbs { n, iterations, burn_in } => {
            Ok(bayes::pgas_gibbs(model, start, y, None, *n, *iterations, *burn_in, false, &mut rng)?.chain)
        }
        AlgorithmConfig::Pmh { n, iterations, burn_in, proposal_cov, scale, walk, pilot_iterations, scheme } => {
            let pf = PfConfig::with_scheme(*scheme);
            let mut prop = RandomWalkProposal::new(proposal_cov, *scale)?;
            let mut from = start.clone();
            if *pilot_iterations > 0 {
                let mut pilot_rng = rng::stream(cfg.seed, "pilot", r as u64);
                let settings = MhSettings { iterations: *pilot_iterations, burn_in: 0, walk: *walk };
                let pilot = bayes::pmh(model, start, y, *n, pf, &prop, &settings, &mut pilot_rng)?;
                let half = &pilot.draws[pilot.len() / 2..];
                let cov = sample_covariance(&half.iter().map(|d| walk.forward(d)).collect::<Vec<_>>());
                match RandomWalkProposal::new(&cov, *scale) {
                    Ok(p) => prop = p,
                    Err(e) => log::warn!("pilot covariance unusable ({e}); keeping the configured proposal"),
                }
                from = model.with_param_vector(start, pilot.draws.last().expect("pilot has draws"))?;
            }
            let settings = MhSettings { iterations: *iterations, burn_in: *burn_in, walk: *walk };
            bayes::pmh(model, &from, y, *n, pf, &prop, &settings, &mut rng)
        }
        _ => unreachable!("not an MCMC algorithm"),
    }
}

fn sample_covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect()
}

struct FitRow {
    k: usize,
    params: Vec<f64>,
    objective: f64,
    step: Option<f64>,
}

struct Fit {
    estimate: Vec<f64>,
    rows: Vec<FitRow>,
    converged: Option<bool>,
}

fn estimate<M: RunnableModel>(
    cfg: &ExperimentConfig,
    model: &M,
    start: &M::Params,
    y: &[f64],
    rng: &mut SimRng,
) -> Result<Fit, smc_sysid::Error> {
    match &cfg.algorithm {
        AlgorithmConfig::DoMl { step_base, decay, max_iter, tol, backtrack, n, m, mode } => {
            let acfg = AscentConfig { step_base: *step_base, decay: *decay, max_iter: *max_iter, tol: *tol, backtrack: *backtrack };
            let res = match (n, m) {
                (Some(n), Some(m)) => {
                    let mut provider = ParticleScore {
                        model,
                        base: start.clone(),
                        y,
                        n: *n,
                        m: *m,
                        mode: *mode,
                        pf: PfConfig::default(),
                        rng: &mut *rng,
                    };
                    ml::gradient_ascent_ml(&mut provider, &model.to_search(start), &acfg)?
                }
                _ => {
                    let (_, p) = model.as_lgss(start).expect("validated");
                    let mut provider = KalmanScore { base: p, y };
                    ml::gradient_ascent_ml(&mut provider, &[p.theta], &acfg)?
                }
            };
            let to_params = |point: &[f64]| -> Result<Vec<f64>, smc_sysid::Error> {
                Ok(model.param_vector(&model.from_search(start, point)?))
            };
            let rows = res
                .history
                .iter()
                .map(|it| Ok(FitRow { k: it.k, params: to_params(&it.point)?, objective: it.objective, step: Some(it.step) }))
                .collect::<Result<Vec<_>, smc_sysid::Error>>()?;
            Ok(Fit { estimate: to_params(&res.estimate)?, rows, converged: Some(res.converged) })
        }
        AlgorithmConfig::Em { max_iter, tol } => {
            let (_, p) = model.as_lgss(start).expect("validated");
            let res = ml::em_lgss(&p, y, *max_iter, *tol)?;
            Ok(em_fit(vec![res.estimate.theta], res.history, Some(res.converged)))
        }
        AlgorithmConfig::Psem { n, m, max_iter, mode } => {
            let pcfg = PsemConfig { n: *n, m: *m, max_iter: *max_iter, mode: *mode, pf: PfConfig::default() };
            let res = ml::psem(model, start, y, &pcfg, rng)?;
            Ok(em_fit(model.param_vector(&res.estimate), res.history, None))
        }
        AlgorithmConfig::Psaem { n, max_iter, step_exponent } => {
            let pcfg = PsaemConfig { n: *n, max_iter: *max_iter, step_exponent: *step_exponent };
            let res = ml::psaem(model, start, y, &pcfg, rng)?;
            let rows = res
                .history
                .into_iter()
                .map(|it| FitRow { k: it.k, params: it.params, objective: it.loglik, step: Some(it.step) })
                .collect();
            Ok(Fit { estimate: model.param_vector(&res.estimate), rows, converged: None })
        }
        _ => unreachable!("not an optimisation algorithm"),
    }
}

fn em_fit(estimate: Vec<f64>, history: Vec<ml::EmIterate>, converged: Option<bool>) -> Fit {
    let rows = history
        .into_iter()
        .map(|it| FitRow { k: it.k, params: it.params, objective: it.loglik, step: None })
        .collect();
    Fit { estimate, rows, converged }
}

#[allow(clippy::type_complexity)]
fn particle_smoother<M: StateSpaceModel>(
    model: &M,
    params: &M::Params,
    y: &[f64],
    n: usize,
    m: usize,
    mode: BackwardMode,
    rng: &mut SimRng,
) -> Result<(Vec<f64>, Vec<f64>), smc_sysid::Error> {
    let ps = bootstrap_pf(model, params, y, n, PfConfig::with_scheme(ResamplingScheme::Multinomial), rng)?;
    let trajs = ffbsi(model, params, &ps, m, mode, rng)?;
    let mut mean = Vec::with_capacity(y.len());
    let mut var = Vec::with_capacity(y.len());
    for t in 0..y.len() {
        let col: Vec<f64> = trajs.iter().map(|x| x[t]).collect();
        mean.push(diagnostics::mean(&col));
        var.push(if m > 1 { diagnostics::variance(&col) } else { 0.0 });
    }
    Ok((mean, var))
}

/// Recomputes the posterior summary of a saved `chain.csv`.
pub fn chain_diagnostics(path: &Path, burn_in: usize, bins: Option<usize>, out: Option<&Path>) -> Result<PosteriorSummary, CliError> {
    let chain = read_chain(path, burn_in)?;
    if burn_in >= chain.len() {
        return Err(CliError::Validation(format!("burn-in {burn_in} leaves no draws of {}", chain.len())));
    }
    let summary = posterior_summary(std::slice::from_ref(&chain));
    if let Some(dir) = out {
        let mut art = Artifacts::new(dir)?;
        for (j, name) in chain.names.iter().enumerate() {
            art.histogram(name, &histogram(&chain.kept(j), bins))?;
        }
        art.json("summary.json", &summary)?;
    }
    Ok(summary)
}

fn read_chain(path: &Path, burn_in: usize) -> Result<ParameterChain, CliError> {
    let bad = |msg: String| CliError::Validation(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 4 || cols[0] != "m" || cols[cols.len() - 2] != "loglik" || cols[cols.len() - 1] != "accepted" {
        return Err(bad("expected columns m, params..., loglik, accepted".into()));
    }
    let names: Vec<&str> = cols[1..cols.len() - 2].to_vec();
    let mut chain = ParameterChain::new(&names, burn_in);
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |j: usize| -> Result<f64, CliError> {
            rec[j].parse::<f64>().map_err(|_| bad(format!("line {}: `{}` is not a number", i + 2, &rec[j])))
        };
        let draw = (1..=names.len()).map(num).collect::<Result<Vec<_>, _>>()?;
        let ll = num(names.len() + 1)?;
        let accepted = &rec[names.len() + 2] == "1";
        chain.push(draw.clone(), ll, accepted, draw);
    }
    Ok(chain)
}
