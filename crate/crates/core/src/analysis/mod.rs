//! Sweeps, scaling fits, density-curve shapes and the analytic-vs-grid
//! cross-validation.

mod crossval;
mod figure;
mod fit;
mod sweep;

pub use crossval::{cross_validate, density_linf_relative, CrossValidationOptions, CrossValidationReport, OracleRun};
pub use figure::{figure1_curves, DensityCurve, DensitySurface};
pub use fit::{fit_power_law, ScalingFit};
pub use sweep::{run_sweep, SigmaScaling, SweepOutput, SweepRecord, SweepSpec, SweepVariable};
