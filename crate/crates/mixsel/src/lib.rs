//! Projection density estimation for stationary dependent data.
//!
//! The data are split into `p` odd-indexed blocks of length `q` separated by
//! gaps of equal length; only the odd blocks enter any statistic, which
//! makes the pieces nearly independent when the underlying chain mixes. On
//! top of the blocked empirical measure the crate provides:
//!
//! - nested collections of projection models over histogram, trigonometric
//!   and Haar-wavelet systems on [0, 1) ([`basis`]);
//! - least-squares projection estimators and their exact risk against a
//!   known sampling density ([`estimator`]);
//! - block-resampling penalties with exchangeable weights, in closed form or
//!   by Monte Carlo ([`penalty`]), and penalized selection ([`selection`]);
//! - the slope heuristic for calibrating the penalty multiplier from the
//!   dimension path alone ([`slope`]);
//! - stationary simulators with analytically known marginals for validation
//!   and experiments ([`process`]).
//!
//! Everything is deterministic given the seeds; see [`seed`] for the stream
//! derivation scheme.

pub mod basis;
pub mod blocks;
pub mod density;
pub mod error;
pub mod estimator;
pub mod penalty;
pub mod process;
pub mod quad;
pub mod seed;
pub mod selection;
pub mod slope;

pub use basis::{
    enumerate_models, enumerate_models_with, BasisFunction, BasisLabel, CollectionDescriptor,
    CollectionKind, CollectionLimits, Model, ModelCollection,
};
pub use blocks::{
    block_empirical, block_means, make_blocks, AsymptoticRange, BlockScheme, BlockedSample,
};
pub use density::{DensitySpec, PolyPiece, TrueDensity};
pub use error::{Error, Result};
pub use estimator::{evaluate_density, project, risk_against, ProjectionFit, RiskReport};
pub use penalty::{
    ideal_penalty, penalty_closed_form, penalty_monte_carlo, PenaltyMethod, PenaltyRecord,
    WeightKind, WeightLaw,
};
pub use process::{estimate_dam, r_am, simulate, ProcessKind, ProcessSpec, DEFAULT_BURN_IN};
pub use seed::derive_seed;
pub use selection::{
    criterion_rows, run_ppe, select_model, CriterionRow, PenaltyConfig, PenaltyEvaluation,
    SelectionReport,
};
pub use slope::{
    complexity_path, default_k_grid, detect_jump, k_grid, slope_rows, slope_select, DeltaMeasure,
    JumpOutcome, PathPoint, SlopeReport, SlopeRow,
};
