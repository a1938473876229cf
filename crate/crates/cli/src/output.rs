//! CSV and JSON writers. Floats are written with `Display`, which gives the
//! shortest representation that parses back to the same value.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smc_sysid::bayes::ParameterChain;
use smc_sysid::diagnostics::{self, ChainSummary, Histogram};

use crate::CliError;

/// Collects the paths of files written during a run.
#[derive(Debug, Default)]
pub struct Artifacts {
    dir: PathBuf,
    pub paths: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Artifacts { dir: dir.to_path_buf(), paths: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&mut self, name: &str, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let path = self.path(name);
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.paths.push(path);
        Ok(())
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.paths.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).expect("summary serialises");
        s.push('\n');
        self.text(name, &s)
    }

    pub fn chain(&mut self, name: &str, chain: &ParameterChain) -> Result<(), CliError> {
        let mut header = vec!["m".to_string()];
        header.extend(chain.names.iter().cloned());
        header.push("loglik".into());
        header.push("accepted".into());
        let rows = (0..chain.len()).map(|m| {
            let mut row = vec![m.to_string()];
            row.extend(chain.draws[m].iter().map(f64::to_string));
            row.push(chain.loglik[m].to_string());
            row.push(u8::from(chain.accepted[m]).to_string());
            row
        });
        self.csv(name, &header, rows)
    }

    pub fn histogram(&mut self, param: &str, h: &Histogram) -> Result<(), CliError> {
        let header = ["bin_left", "bin_right", "count"].map(String::from);
        let rows = h
            .counts
            .iter()
            .enumerate()
            .map(|(i, c)| vec![h.edges[i].to_string(), h.edges[i + 1].to_string(), c.to_string()]);
        self.csv(&format!("hist_{param}.csv"), &header, rows)
    }
}

/// Posterior summary pooled over one or more chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub params: Vec<String>,
    pub chains: usize,
    pub iterations: usize,
    pub burn_in: usize,
    /// Post-burn-in draws per parameter, summed over chains.
    pub kept: usize,
    pub means: BTreeMap<String, f64>,
    pub sds: BTreeMap<String, f64>,
    pub acceptance_rate: f64,
    /// Mean over chains of the per-chain IACT (`null` for a constant chain).
    pub iact: BTreeMap<String, f64>,
    /// Sum over chains of `kept / iact`.
    pub ess: BTreeMap<String, f64>,
    pub mcse: BTreeMap<String, f64>,
    /// Potential scale reduction; present with two or more chains.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhat: Option<BTreeMap<String, f64>>,
}

/// Summary of the post-burn-in parts of `chains`, which share names and
/// burn-in.
pub fn posterior_summary(chains: &[ParameterChain]) -> PosteriorSummary {
    let first = &chains[0];
    let names = first.names.clone();
    let mut s = PosteriorSummary {
        params: names.clone(),
        chains: chains.len(),
        iterations: first.len().saturating_sub(1),
        burn_in: first.burn_in,
        kept: 0,
        means: BTreeMap::new(),
        sds: BTreeMap::new(),
        acceptance_rate: chains.iter().map(ParameterChain::acceptance_rate).sum::<f64>() / chains.len() as f64,
        iact: BTreeMap::new(),
        ess: BTreeMap::new(),
        mcse: BTreeMap::new(),
        rhat: (chains.len() > 1).then(BTreeMap::new),
    };
    for (j, name) in names.iter().enumerate() {
        let kept: Vec<Vec<f64>> = chains.iter().map(|c| c.kept(j)).collect();
        let pooled: Vec<f64> = kept.concat();
        let per: Vec<ChainSummary> = kept.iter().map(|k| diagnostics::summarize(k)).collect();
        s.kept = pooled.len();
        let mean = diagnostics::mean(&pooled);
        let sd = diagnostics::variance(&pooled).sqrt();
        let ess: f64 = per.iter().map(|p| p.ess).sum();
        s.means.insert(name.clone(), mean);
        s.sds.insert(name.clone(), sd);
        s.iact.insert(name.clone(), per.iter().map(|p| p.iact).sum::<f64>() / per.len() as f64);
        s.ess.insert(name.clone(), ess);
        s.mcse.insert(name.clone(), sd / ess.sqrt());
        if let Some(r) = s.rhat.as_mut() {
            r.insert(name.clone(), rhat(&kept));
        }
    }
    s
}

/// Gelman–Rubin statistic from equal-length chains.
pub fn rhat(chains: &[Vec<f64>]) -> f64 {
    let n = chains[0].len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| diagnostics::mean(c)).collect();
    let w = chains.iter().map(|c| diagnostics::variance(c)).sum::<f64>() / chains.len() as f64;
    let b = n * diagnostics::variance(&means);
    (((n - 1.0) / n * w + b / n) / w).sqrt()
}

pub fn floats(values: &[f64]) -> Vec<String> {
    values.iter().map(f64::to_string).collect()
}
