//! Maximum-likelihood estimators.
//!
//! - [`gradient_ascent_ml`]: steepest ascent with step `γ·k^{-α}`, driven by
//!   any [`GradientProvider`] (exact Kalman sensitivities or particle-based
//!   Fisher-identity gradients).
//! - [`em_lgss`]: exact EM for the linear-Gaussian model.
//! - [`psem`]: EM with the E-step approximated by a particle smoother.
//! - [`psaem`]: stochastic-approximation EM driven by the PGAS kernel.

mod ascent;
mod em;
mod psaem;
mod score;
mod stats;

pub use ascent::{gradient_ascent_ml, AscentConfig, AscentResult, GradientProvider, Iterate};
pub use em::{em_lgss, psem, psem_with, EmIterate, EmResult, PsemConfig};
pub use psaem::{psaem, PsaemConfig, PsaemIterate, PsaemResult};
pub use score::{fisher_gradient, KalmanScore, ParticleScore, ScoreModel};
pub use stats::{EmModel, SufficientStats};
