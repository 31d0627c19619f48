//! Reproducible experiment drivers over the operator, profile and solver
//! layers.
//!
//! Each driver takes a plain configuration struct with documented defaults,
//! runs entirely in `f64`, and returns a serializable report that embeds the
//! configuration, the measurements and the pass verdicts, so any published
//! number is regenerable from the report alone.  Writing artifacts is the
//! caller's job ([`crate::io`]).
//!
//! Two evidence paths stay independent throughout: closed-form profile
//! checks never consult the solver, and solver checks use closed forms only
//! as boundary data and error references.

mod bernstein;
mod limit_rate;
mod rescale;
mod sharp_constant;
mod symmetry;

use thiserror::Error;

use crate::grid::GridError;
use crate::profiles::ProfileError;
use crate::pucci::PucciError;
use crate::solver::SolveError;

pub use bernstein::{
    bernstein_experiment, bernstein_fit, gradient_magnitudes_1d, gradient_magnitudes_2d,
    BernsteinCase, BernsteinConfig, BernsteinFit, BernsteinReport,
};
pub use limit_rate::{limit_rate_experiment, LimitRateConfig, LimitRateReport, LimitRateRow};
pub use rescale::{
    rescale_experiment, rescale_field_residuals, rescale_profile_residual, RescaleCase,
    RescaleConfig, RescaleReport,
};
pub use sharp_constant::{sharp_constant_probe, SharpConstantConfig, SharpConstantReport};
pub use symmetry::{
    symmetry_strip, symmetry_sweep, HeightOsc, LateralMode, SymmetryConfig, SymmetryReport,
    SymmetrySweep,
};

/// Failure modes shared by the experiment drivers.  Solver non-convergence
/// within an experiment that can still report honestly is flagged in the
/// report instead; `Unconverged` is reserved for prerequisite solves whose
/// failure leaves nothing to measure.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Pucci(#[from] PucciError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("prerequisite solve stalled at residual {residual:e}")]
    Unconverged { residual: f64 },
    #[error("{got} fit bins in the window, need at least {need}")]
    InsufficientBins { got: usize, need: usize },
    #[error("sample point {x} escapes the source domain")]
    DomainEscape { x: f64 },
    #[error("bad parameter {name}: {why}")]
    BadParameter { name: &'static str, why: String },
}
