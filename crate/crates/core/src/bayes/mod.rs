//! Posterior samplers over the model parameters.
//!
//! - [`mh_exact`]: random-walk Metropolis–Hastings with the exact Kalman
//!   likelihood.
//! - [`pmh`]: particle Metropolis–Hastings, the same chain driven by the
//!   bootstrap filter's unbiased likelihood estimate.
//! - [`gibbs_lgss`]: conjugate Gibbs with exact backward simulation.
//! - [`pgas_gibbs`]: Gibbs with the PGAS kernel as the state block.
//! - [`sample_varve_conditional`]: exact draw of `(φ, τ)` given a varve
//!   state trajectory.

mod chain;
mod gibbs;
mod mh;
mod varve_conditional;

pub use chain::{ParameterChain, RandomWalkProposal, WalkSpace};
pub use gibbs::{gibbs_lgss, lgss_precision_conditional, pgas_gibbs, ConjugateModel, GibbsOutput};
pub use mh::{metropolis_hastings, mh_exact, pmh, MhSettings};
pub use varve_conditional::{sample_varve_conditional, varve_acceptance_probability, varve_conditional_logpdf};
