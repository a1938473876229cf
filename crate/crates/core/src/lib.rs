//! Sequential Monte Carlo system identification for scalar state-space models.
//!
//! The crate covers the full pipeline from particle filtering to parameter
//! inference:
//!
//! - [`model`]: the [`StateSpaceModel`](model::StateSpaceModel) abstraction, density
//!   primitives, the linear-Gaussian reference model and the ice-varve model.
//! - [`kalman`]: exact filtering, likelihood, θ-sensitivities, smoothing and
//!   backward sampling for the linear-Gaussian model.
//! - [`smc`]: bootstrap and auxiliary particle filters, resampling, genealogy
//!   tracing, FFBSi smoothing and the PGAS Markov kernel.
//! - [`ml`]: maximum-likelihood estimators (gradient ascent, exact EM,
//!   particle-smoother EM and particle SAEM).
//! - [`bayes`]: posterior samplers (exact MH, particle MH, conjugate Gibbs
//!   and PGAS-within-Gibbs).
//! - [`diagnostics`]: ESS, IACT and histogram helpers.
//!
//! Indices are zero-based throughout: time `t` runs over `0..T` and particle
//! ancestors refer to positions in the previous particle vector.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bayes;
pub mod diagnostics;
pub mod error;
pub mod kalman;
pub mod ml;
pub mod model;
pub mod rng;
pub mod smc;

pub use error::{Error, Result};
pub use model::{Dataset, Lgss, LgssParams, StateSpaceModel, Varve, VarveParams};
