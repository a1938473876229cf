use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::diagnostics::{summarize, ChainSummary};
use crate::error::{Error, Result};

/// Sequence of parameter draws `θ[0..=M]` with per-row bookkeeping.
///
/// Row `m` stores the state after iteration `m`; `accepted[m]` records
/// whether that state came from an accepted proposal (row 0 is the
/// initial point and counts as accepted). A rejected row repeats the
/// previous draw and its log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterChain {
    pub names: Vec<String>,
    pub draws: Vec<Vec<f64>>,
    pub loglik: Vec<f64>,
    pub accepted: Vec<bool>,
    /// Proposed point at each row (the draw itself for Gibbs updates).
    pub proposals: Vec<Vec<f64>>,
    pub burn_in: usize,
}

impl ParameterChain {
    pub fn new(names: &[&str], burn_in: usize) -> Self {
        ParameterChain {
            names: names.iter().map(|s| s.to_string()).collect(),
            draws: Vec::new(),
            loglik: Vec::new(),
            accepted: Vec::new(),
            proposals: Vec::new(),
            burn_in,
        }
    }

    pub fn push(&mut self, draw: Vec<f64>, loglik: f64, accepted: bool, proposal: Vec<f64>) {
        self.draws.push(draw);
        self.loglik.push(loglik);
        self.accepted.push(accepted);
        self.proposals.push(proposal);
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[j]).collect()
    }

    /// Component `j` after discarding the burn-in rows.
    pub fn kept(&self, j: usize) -> Vec<f64> {
        self.draws.iter().skip(self.burn_in).map(|d| d[j]).collect()
    }

    /// Fraction of accepted proposals over rows `1..`.
    pub fn acceptance_rate(&self) -> f64 {
        if self.len() < 2 {
            return f64::NAN;
        }
        self.accepted[1..].iter().filter(|&&a| a).count() as f64 / (self.len() - 1) as f64
    }

    pub fn summaries(&self) -> Vec<ChainSummary> {
        (0..self.dim()).map(|j| summarize(&self.kept(j))).collect()
    }
}

/// Coordinates in which the random walk moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkSpace {
    #[default]
    Identity,
    /// Walk on `1/θ_i` for component `i` (a precision walked as a variance).
    Reciprocal(usize),
}

impl WalkSpace {
    pub fn forward(&self, theta: &[f64]) -> Vec<f64> {
        let mut v = theta.to_vec();
        if let WalkSpace::Reciprocal(i) = *self {
            v[i] = 1.0 / v[i];
        }
        v
    }

    /// Inverse map; `None` outside the image of [`forward`](Self::forward).
    pub fn inverse(&self, psi: &[f64]) -> Option<Vec<f64>> {
        let mut v = psi.to_vec();
        if let WalkSpace::Reciprocal(i) = *self {
            if !(v[i] > 0.0) {
                return None;
            }
            v[i] = 1.0 / v[i];
        }
        Some(v)
    }

    /// `log |det ∂θ/∂ψ|` expressed at `θ`.
    pub fn log_jacobian(&self, theta: &[f64]) -> f64 {
        match *self {
            WalkSpace::Identity => 0.0,
            WalkSpace::Reciprocal(i) => 2.0 * theta[i].abs().ln(),
        }
    }
}

/// Gaussian random walk `ψ' ~ N(ψ, scale·Σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalkProposal {
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    scale: f64,
}

impl RandomWalkProposal {
    /// `cov` is row-major `d × d`.
    pub fn new(cov: &[Vec<f64>], scale: f64) -> Result<Self> {
        let d = cov.len();
        if d == 0 || cov.iter().any(|r| r.len() != d) {
            return Err(Error::domain("proposal covariance must be a nonempty square matrix"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("proposal scale must be positive, got {scale}")));
        }
        let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
        if (0..d).any(|i| (0..d).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (1.0 + m[(i, j)].abs()))) {
            return Err(Error::domain("proposal covariance is not symmetric"));
        }
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::domain("proposal covariance is not positive definite"))?
            .l();
        Ok(RandomWalkProposal { cov: m, chol, scale })
    }

    /// One-dimensional walk with variance `var`.
    pub fn scalar(var: f64) -> Result<Self> {
        Self::new(&[vec![var]], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.cov.nrows()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn covariance(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.cov[(i, j)]).collect()).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, current: &[f64], rng: &mut R) -> Vec<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        let step = &self.chol * z * self.scale.sqrt();
        current.iter().zip(step.iter()).map(|(c, s)| c + s).collect()
    }
}
