//! Tipping time of a quantum rod balanced upright on a hard floor.
//!
//! The rod starts in a Gaussian of width `σ` around the vertical. Near the
//! top of the potential the dynamics is an inverted harmonic oscillator, whose
//! short-time propagator gives the density `P(θ, t)` and the tipping time in
//! closed form ([`semiclassical`]). A Crank–Nicolson grid solver for the full
//! `cos θ` potential between the walls ([`oracle`]) checks those predictions
//! independently, and [`analysis`] turns the scaling claims into sweeps, fits
//! and pass/fail reports.
//!
//! ```
//! use rodtip::{InvertedOscillator, RodParameters};
//!
//! let params = RodParameters::natural(0.01).unwrap();
//! let model = InvertedOscillator::new(&params);
//! let t_tip = model.tipping_time_exact(0.1).unwrap();
//! assert!((t_tip - 0.8058).abs() < 1e-3);
//! ```

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod optimize;
pub mod oracle;
pub mod output;
pub mod params;
pub mod semiclassical;
pub mod svg;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{AngularGrid, WaveFunction};
pub use oracle::{GridSolver, NumericOptions, PotentialKind, PotentialSpec};
pub use params::{DerivedParameters, GaussianState, Regime, RodParameters, UnitsMode};
pub use semiclassical::{InvertedOscillator, PropagatorValidity, TippingReport, ValidityPolicy};
