//! Sparse reject-option classification with the double ramp loss.
//!
//! The training objective is an l1-regularized empirical risk under the
//! double ramp loss. It is nonconvex, but splits into a difference of two
//! convex functions, so [`trainer::train`] minimizes it by solving a
//! sequence of linear programs with the dense simplex solver in [`lp`].
//!
//! Besides training, the crate carries the numerical checks for the
//! statistical properties of the loss ([`theory`]): Fisher consistency of
//! the conditional risk, the excess-risk inequalities, and a Monte Carlo
//! check that the reject-loss excess risk is dominated by the surrogate
//! excess risk.
//!
//! Module map:
//!
//! - [`loss`]: reject loss, double ramp loss, conditional risks.
//! - [`kernel`]: Gaussian / linear kernels and Gram matrices.
//! - [`lp`]: LP model, canonicalization, two-phase simplex.
//! - [`trainer`]: the DC loop.
//! - [`model`]: saved models, prediction, persistence.
//! - [`data`]: CSV ingestion and standardization.
//! - [`eval`]: metrics, cross-validation, label noise, excess risk.
//! - [`distribution`]: synthetic 1-D and 2-D Gaussian mixtures.
//! - [`theory`]: verification harness over parameter grids.

pub mod data;
pub mod distribution;
pub mod error;
pub mod eval;
pub mod kernel;
pub mod loss;
pub mod lp;
pub mod model;
pub mod theory;
pub mod trainer;

pub use error::{Error, Result};
pub use kernel::{KernelMatrix, KernelSpec};
pub use loss::{Decision, LossConfig};
pub use model::SavedModel;
pub use trainer::{ModelParams, TrainConfig, TrainReport};
