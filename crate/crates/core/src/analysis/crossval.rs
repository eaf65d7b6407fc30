use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::oracle::{GridSolver, NumericOptions, PotentialKind};
use crate::params::{GaussianState, Regime, RodParameters};
use crate::semiclassical::InvertedOscillator;

/// Tolerances and grid settings for [`cross_validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossValidationOptions {
    pub n_points: usize,
    pub dt: Option<f64>,
    /// Relative tolerance for the full `cos θ` potential.
    pub tolerance_full: f64,
    /// Relative tolerance for the quadratic potential.
    pub tolerance_quadratic: f64,
}

impl Default for CrossValidationOptions {
    fn default() -> Self {
        Self {
            n_points: crate::oracle::DEFAULT_GRID_POINTS,
            dt: None,
            tolerance_full: 0.05,
            tolerance_quadratic: 0.01,
        }
    }
}

/// Grid result for one potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRun {
    pub potential: PotentialKind,
    pub t_tip_numeric: f64,
    pub t_tip_relative_error: f64,
    /// L∞ density error relative to the analytic peak density, at `t_tip/2`.
    pub density_error_half: f64,
    /// Same, at `t_tip`.
    pub density_error_tip: f64,
    pub norm_drift: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidationReport {
    pub sigma: f64,
    pub hbar: f64,
    pub regime: Regime,
    pub t_tip_exact: f64,
    pub validity_ratio: f64,
    pub n_points: usize,
    pub dt: f64,
    pub full: OracleRun,
    pub quadratic: OracleRun,
    /// The quadratic potential, which the closed form solves exactly, agrees
    /// at least as well as the full one.
    pub ordering_holds: bool,
    pub passed: bool,
}

/// `max_j |P_grid(θ_j) − P_analytic(θ_j)| / max_j P_analytic(θ_j)`.
pub fn density_linf_relative(model: &InvertedOscillator, state: &GaussianState, wf: &WaveFunction) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for (&theta, z) in wf.grid.nodes().iter().zip(&wf.amplitudes) {
        let p = model.density_analytic(state, theta, wf.time)?;
        peak = peak.max(p);
        worst = worst.max((z.norm_sqr() - p).abs());
    }
    Ok(worst / peak)
}

fn run_one(
    params: &RodParameters,
    state: &GaussianState,
    model: &InvertedOscillator,
    t_exact: f64,
    kind: PotentialKind,
    options: &CrossValidationOptions,
) -> Result<OracleRun> {
    let numeric = NumericOptions {
        n_points: options.n_points,
        dt: options.dt,
        potential: kind,
    };
    let solver = GridSolver::new(params, &numeric)?;
    let tip = solver.tipping_time(state, model.validity_window())?;

    let mut wf = solver.initial(state)?;
    let norm0 = wf.norm();
    solver.advance(&mut wf, 0.5 * t_exact)?;
    let half = density_linf_relative(model, state, &wf)?;
    let remaining = t_exact - wf.time;
    solver.advance(&mut wf, remaining)?;
    let at_tip = density_linf_relative(model, state, &wf)?;

    let tolerance = match kind {
        PotentialKind::FullCosine => options.tolerance_full,
        PotentialKind::Quadratic => options.tolerance_quadratic,
    };
    let rel = (tip.t_tip - t_exact).abs() / t_exact;
    Ok(OracleRun {
        potential: kind,
        t_tip_numeric: tip.t_tip,
        t_tip_relative_error: rel,
        density_error_half: half,
        density_error_tip: at_tip,
        norm_drift: (wf.norm() - norm0).abs().max(tip.norm_drift),
        tolerance,
        passed: rel <= tolerance && half <= tolerance && at_tip <= tolerance,
    })
}

/// Runs the grid solver with both potentials and compares tipping time and
/// density against the closed form.
pub fn cross_validate(
    params: &RodParameters,
    sigma: f64,
    options: &CrossValidationOptions,
) -> Result<CrossValidationReport> {
    let model = InvertedOscillator::new(params);
    let regime = model.derived().regime();
    if regime == Regime::Classical {
        return Err(Error::InvalidInput(format!(
            "cross-validation needs the quantum or intermediate regime (lambda_dB/a = {})",
            model.derived().de_broglie_ratio
        )));
    }
    let state = GaussianState::new(sigma)?;
    let t_exact = model.tipping_time_exact(sigma)?;
    let (full, quadratic) = rayon::join(
        || run_one(params, &state, &model, t_exact, PotentialKind::FullCosine, options),
        || run_one(params, &state, &model, t_exact, PotentialKind::Quadratic, options),
    );
    let (full, quadratic) = (full?, quadratic?);
    let dt = GridSolver::new(
        params,
        &NumericOptions {
            n_points: options.n_points,
            dt: options.dt,
            potential: PotentialKind::FullCosine,
        },
    )?
    .dt();
    let ordering_holds = quadratic.t_tip_relative_error <= full.t_tip_relative_error
        && quadratic.density_error_tip <= full.density_error_tip;
    Ok(CrossValidationReport {
        sigma,
        hbar: params.hbar(),
        regime,
        t_tip_exact: t_exact,
        validity_ratio: model.validity(t_exact).ratio,
        n_points: options.n_points,
        dt,
        passed: full.passed && quadratic.passed,
        full,
        quadratic,
        ordering_holds,
    })
}
