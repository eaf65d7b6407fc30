//! The four command-line operations, callable as library functions.
//!
//! Each returns an [`Outcome`] holding what would be printed and the files
//! written, or a [`CommandError`] that maps onto the process exit code.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::{
    cross_validate, density_linf_relative, figure1_curves, fit_power_law, run_sweep, CrossValidationOptions,
    CrossValidationReport, DensitySurface, ScalingFit, SweepOutput, SweepRecord, SweepVariable,
};
use crate::config::{ConfigError, RunConfig};
use crate::error::Error;
use crate::grid::{AngularGrid, WaveFunction};
use crate::optimize::lin_space;
use crate::oracle::{GridSolver, PotentialKind};
use crate::output::{format_number, format_optional, json_document, CsvTable};
use crate::params::GaussianState;
use crate::semiclassical::InvertedOscillator;
use crate::svg::{LineChart, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Time samples per density-vs-time curve in `evolve`.
pub const CURVE_SAMPLES: usize = 201;

#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
    Domain(Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Io { .. } => EXIT_CONFIG,
            CommandError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Config(e) => write!(f, "{e}"),
            CommandError::Domain(e) => write!(f, "domain error: {e}"),
            CommandError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CommandError {}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonPositive { .. }
            | Error::GridTooSmall { .. }
            | Error::InvalidTimeStep(_)
            | Error::InvalidSweep(_) => CommandError::Config(ConfigError::single(e.to_string())),
            other => CommandError::Domain(other),
        }
    }
}

type CmdResult<T> = std::result::Result<T, CommandError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// JSON summary for stdout.
    pub stdout: String,
    pub files: Vec<PathBuf>,
    /// `false` only when a validation check failed.
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_VALIDATION_FAILED
        }
    }
}

struct Artifacts {
    dir: Option<PathBuf>,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: Option<&Path>) -> CmdResult<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|source| CommandError::Io {
                path: d.to_path_buf(),
                source,
            })?;
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> CmdResult<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| CommandError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    fn require_dir(&self, command: &str) -> CmdResult<()> {
        if self.dir.is_none() {
            return Err(ConfigError::single(format!("{command} writes files and needs --out <dir>")).into());
        }
        Ok(())
    }
}

fn model(cfg: &RunConfig) -> InvertedOscillator {
    InvertedOscillator::new(&cfg.parameters).with_policy(cfg.validity_policy())
}

/// Exact, approximate and linearized tipping times with validity and regime.
pub fn tiptime(cfg: &RunConfig) -> CmdResult<Outcome> {
    let report = model(cfg).tipping_report(cfg.sigma)?;
    let doc = json_document(cfg, "tiptime", &report);
    let mut art = Artifacts::new(cfg.out.as_deref())?;
    art.write("tiptime.json", &doc)?;
    Ok(Outcome {
        stdout: doc,
        files: art.files,
        passed: true,
    })
}

#[derive(Debug, Clone, Serialize)]
struct SnapshotComparison {
    time: f64,
    difference_norm: f64,
    density_linf_relative: f64,
}

#[derive(Debug, Clone, Serialize)]
struct EvolveSummary {
    t_end: f64,
    snapshot_times: Vec<f64>,
    n_points: usize,
    dt: Option<f64>,
    final_norm_analytic: Option<f64>,
    final_norm_numeric: Option<f64>,
    comparison: Vec<SnapshotComparison>,
    curves: Option<DensitySurface>,
}

fn snapshot_times(t_end: f64, interval: Option<f64>) -> Vec<f64> {
    if t_end == 0.0 {
        return vec![0.0];
    }
    let interval = interval.unwrap_or(t_end / 10.0);
    let mut times = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * interval;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(t_end);
    times
}

fn snapshot_table(cfg: &RunConfig, wf: &WaveFunction, engine: &str) -> String {
    let mut table = CsvTable::new(&["theta", "re_psi", "im_psi", "density"])
        .with_config(cfg)
        .comment(format!("engine: {engine}"))
        .comment(format!("time: {}", format_number(wf.time)));
    for (&theta, z) in wf.grid.nodes().iter().zip(&wf.amplitudes) {
        table.push_numbers(&[theta, z.re, z.im, z.norm_sqr()]);
    }
    table.render()
}

/// `min_φ ‖ψ_a − e^{iφ} ψ_n‖`. The closed form carries no `V(0)` phase, so
/// only the distance up to a global phase is meaningful.
fn l2_difference(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let dx = a.grid.spacing();
    let overlap: Complex64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    (a.norm() + b.norm() - 2.0 * dx * overlap.norm()).max(0.0).sqrt()
}

fn default_theta_points(sigma: f64) -> Vec<f64> {
    [0.0, sigma, 2.0 * sigma, 3.0 * sigma]
        .into_iter()
        .filter(|t| *t < FRAC_PI_2)
        .collect()
}

/// Snapshots of `ψ(θ, t)` on the grid from the closed form, the grid solver,
/// or both, plus density-vs-time curves at fixed angles.
pub fn evolve(cfg: &RunConfig) -> CmdResult<Outcome> {
    let mut art = Artifacts::new(cfg.out.as_deref())?;
    art.require_dir("evolve")?;
    let model = model(cfg);
    let state = GaussianState::new(cfg.sigma)?;
    let t_end = match cfg.t {
        Some(t) => t,
        None => model.tipping_time_exact(cfg.sigma)?,
    };
    if t_end < 0.0 {
        return Err(Error::NegativeTime(t_end).into());
    }
    if cfg.engine.analytic() {
        // fail before any file is written
        let v = model.validity(t_end);
        if v.ratio >= model.policy().hard_limit {
            return Err(Error::ValidityExceeded {
                time: t_end,
                ratio: v.ratio,
                limit: model.policy().hard_limit,
            }
            .into());
        }
    }
    let times = snapshot_times(t_end, cfg.snapshot_interval);
    let grid = AngularGrid::new(cfg.grid)?;
    let solver = if cfg.engine.numeric() {
        Some(GridSolver::new(&cfg.parameters, &cfg.numeric_options(cfg.potential))?)
    } else {
        None
    };

    let mut analytic = Vec::new();
    if cfg.engine.analytic() {
        for (k, &t) in times.iter().enumerate() {
            let wf = model.evolve_analytic(&state, t, &grid)?;
            art.write(&format!("analytic_{k:04}.csv"), &snapshot_table(cfg, &wf, "analytic"))?;
            analytic.push(wf);
        }
    }
    let mut numeric = Vec::new();
    if let Some(solver) = &solver {
        let mut wf = solver.initial(&state)?;
        for (k, &t) in times.iter().enumerate() {
            let step = t - wf.time;
            solver.advance(&mut wf, step)?;
            art.write(&format!("numeric_{k:04}.csv"), &snapshot_table(cfg, &wf, "numeric"))?;
            numeric.push(wf.clone());
        }
    }

    let mut comparison = Vec::new();
    if !analytic.is_empty() && !numeric.is_empty() {
        let mut table = CsvTable::new(&["time", "difference_norm", "density_linf_relative"]).with_config(cfg);
        for (a, n) in analytic.iter().zip(&numeric) {
            let row = SnapshotComparison {
                time: a.time,
                difference_norm: l2_difference(a, n),
                density_linf_relative: density_linf_relative(&model, &state, n)?,
            };
            table.push_numbers(&[row.time, row.difference_norm, row.density_linf_relative]);
            comparison.push(row);
        }
        art.write("comparison.csv", &table.render())?;
    }

    let curves = if t_end > 0.0 {
        let thetas = cfg
            .theta_points
            .clone()
            .unwrap_or_else(|| default_theta_points(cfg.sigma));
        let lattice = lin_space(0.0, t_end, CURVE_SAMPLES);
        density_curves(cfg, &model, &state, solver.as_ref(), &thetas, &lattice, &mut art)?
    } else {
        None
    };

    let summary = EvolveSummary {
        t_end,
        snapshot_times: times,
        n_points: cfg.grid,
        dt: solver.as_ref().map(GridSolver::dt),
        final_norm_analytic: analytic.last().map(WaveFunction::norm),
        final_norm_numeric: numeric.last().map(WaveFunction::norm),
        comparison,
        curves,
    };
    let doc = json_document(cfg, "evolve", &summary);
    art.write("evolve.json", &doc)?;
    Ok(Outcome {
        stdout: doc,
        files: art.files,
        passed: true,
    })
}

fn density_curves(
    cfg: &RunConfig,
    model: &InvertedOscillator,
    state: &GaussianState,
    solver: Option<&GridSolver>,
    thetas: &[f64],
    lattice: &[f64],
    art: &mut Artifacts,
) -> CmdResult<Option<DensitySurface>> {
    let mut columns = vec!["t".to_string()];
    let mut series: Vec<(String, Vec<f64>, bool)> = Vec::new();
    let surface = if cfg.engine.analytic() {
        let s = figure1_curves(model, state, thetas, lattice)?;
        for c in &s.curves {
            series.push((format!("analytic theta={}", c.theta), c.values.clone(), false));
        }
        Some(s)
    } else {
        None
    };
    if let Some(solver) = solver {
        let mut wf = solver.initial(state)?;
        let mut values = vec![Vec::with_capacity(lattice.len()); thetas.len()];
        for &t in lattice {
            let step = t - wf.time;
            solver.advance(&mut wf, step)?;
            for (v, &th) in values.iter_mut().zip(thetas) {
                v.push(wf.density_at(th));
            }
        }
        for (v, &th) in values.into_iter().zip(thetas) {
            series.push((format!("numeric theta={th}"), v, true));
        }
    }

    columns.extend(series.iter().map(|s| s.0.replace(' ', "_")));
    let mut table = CsvTable::new(&columns).with_config(cfg);
    for (i, &t) in lattice.iter().enumerate() {
        let mut row = vec![t];
        row.extend(series.iter().map(|s| s.1[i]));
        table.push_numbers(&row);
    }
    art.write("density_vs_time.csv", &table.render())?;

    let mut chart = LineChart::new(format!("P(theta, t), sigma = {}", cfg.sigma), "t", "P(theta, t)");
    for (label, values, dashed) in series {
        let s = Series::new(label, lattice.iter().copied().zip(values).collect());
        chart.push(if dashed { s.dashed() } else { s });
    }
    art.write("density_vs_time.svg", &chart.render())?;
    Ok(surface)
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl InvariantCheck {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub cross_validation: CrossValidationReport,
    pub checks: Vec<InvariantCheck>,
    pub passed: bool,
}

/// Relative limits used by `validate` on the full-potential evolution to `t_tip`.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
pub const PARITY_LIMIT: f64 = 1e-10;
pub const ENERGY_DRIFT_LIMIT: f64 = 1e-6;
pub const PEAK_CONSISTENCY_LIMIT: f64 = 1e-8;

/// Runs the grid cross-check and the invariant suite.
pub fn validation_summary(cfg: &RunConfig) -> CmdResult<ValidationSummary> {
    let options = CrossValidationOptions {
        n_points: cfg.grid,
        dt: cfg.dt,
        tolerance_full: cfg.tolerance_full,
        tolerance_quadratic: cfg.tolerance_quadratic,
    };
    let report = cross_validate(&cfg.parameters, cfg.sigma, &options)?;
    let model = model(cfg);
    let state = GaussianState::new(cfg.sigma)?;
    let t_tip = report.t_tip_exact;

    let solver = GridSolver::new(&cfg.parameters, &cfg.numeric_options(PotentialKind::FullCosine))?;
    let hamiltonian = solver.hamiltonian();
    let mut wf = solver.initial(&state)?;
    let (n0, e0) = (wf.norm(), hamiltonian.energy(&wf));
    solver.advance(&mut wf, t_tip)?;
    let peak = model.density_peak_time(&state, cfg.sigma)?;

    let mut checks = vec![
        InvariantCheck::at_most(
            "t_tip_numeric_full_relative_error",
            report.full.t_tip_relative_error,
            report.full.tolerance,
        ),
        InvariantCheck::at_most(
            "density_linf_full_at_tip",
            report.full.density_error_tip,
            report.full.tolerance,
        ),
        InvariantCheck::at_most(
            "density_linf_full_at_half_tip",
            report.full.density_error_half,
            report.full.tolerance,
        ),
        InvariantCheck::at_most(
            "t_tip_numeric_quadratic_relative_error",
            report.quadratic.t_tip_relative_error,
            report.quadratic.tolerance,
        ),
        InvariantCheck::at_most("norm_drift", (wf.norm() - n0).abs(), NORM_DRIFT_LIMIT),
        InvariantCheck::at_most("parity_defect", wf.parity_defect(), PARITY_LIMIT),
        InvariantCheck::at_most(
            "energy_drift_relative",
            ((hamiltonian.energy(&wf) - e0) / e0).abs(),
            ENERGY_DRIFT_LIMIT,
        ),
        InvariantCheck::at_most(
            "peak_time_consistency",
            ((peak - t_tip) / t_tip).abs(),
            PEAK_CONSISTENCY_LIMIT,
        ),
    ];
    checks.push(InvariantCheck {
        name: "quadratic_at_least_as_close_as_full".into(),
        value: if report.ordering_holds { 1.0 } else { 0.0 },
        limit: 1.0,
        passed: report.ordering_holds,
    });
    let passed = report.passed && checks.iter().all(|c| c.passed);
    Ok(ValidationSummary {
        cross_validation: report,
        checks,
        passed,
    })
}

pub fn validate(cfg: &RunConfig) -> CmdResult<Outcome> {
    let summary = validation_summary(cfg)?;
    let doc = json_document(cfg, "validate", &summary);
    let mut art = Artifacts::new(cfg.out.as_deref())?;
    art.write("validate.json", &doc)?;
    Ok(Outcome {
        stdout: doc,
        files: art.files,
        passed: summary.passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedFit {
    pub output: SweepOutput,
    /// `all` or `linearized` (rows with `IΩσ²/ħ < 0.1`).
    pub window_kind: String,
    pub fit: ScalingFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trend {
    pub output: SweepOutput,
    pub strictly_increasing: bool,
    pub strictly_decreasing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub rows_with_errors: usize,
    pub fits: Vec<NamedFit>,
    pub trends: Vec<Trend>,
}

/// Linearized fit window for σ sweeps.
pub const LINEARIZED_FIT_LIMIT: f64 = 0.1;

fn column(records: &[SweepRecord], output: SweepOutput) -> Vec<Option<f64>> {
    records
        .iter()
        .map(|r| match output {
            SweepOutput::TipExact => r.t_tip_exact,
            SweepOutput::TipApprox => r.t_tip_approx,
            SweepOutput::TipNumeric => r.t_tip_numeric,
            SweepOutput::ValidityRatio => r.validity_ratio,
            SweepOutput::UncertaintyProduct => r.uncertainty_product,
            // the log stays finite after P underflows
            SweepOutput::DensityProbe => r.log_density_probe,
        })
        .collect()
}

fn output_name(o: SweepOutput) -> &'static str {
    match o {
        SweepOutput::TipExact => "t_tip_exact",
        SweepOutput::TipApprox => "t_tip_approx",
        SweepOutput::TipNumeric => "t_tip_numeric",
        SweepOutput::ValidityRatio => "validity_ratio",
        SweepOutput::UncertaintyProduct => "uncertainty_product",
        SweepOutput::DensityProbe => "density_probe",
    }
}

fn is_tip(o: SweepOutput) -> bool {
    matches!(
        o,
        SweepOutput::TipExact | SweepOutput::TipApprox | SweepOutput::TipNumeric
    )
}

/// Fits and trends over a finished sweep.
pub fn summarize_sweep(cfg: &RunConfig, records: &[SweepRecord]) -> CmdResult<SweepSummary> {
    let spec = cfg
        .sweep_spec()
        .ok_or_else(|| ConfigError::single("sweep needs sweep_variable and sweep values"))?;
    let mut fits = Vec::new();
    let mut trends = Vec::new();
    for &output in &spec.outputs {
        let col = column(records, output);
        let present: Vec<f64> = col.iter().flatten().copied().collect();
        trends.push(Trend {
            output,
            strictly_increasing: present.len() == col.len() && present.windows(2).all(|w| w[1] > w[0]),
            strictly_decreasing: present.len() == col.len() && present.windows(2).all(|w| w[1] < w[0]),
        });
        if !is_tip(output) {
            continue;
        }
        let mut windows = vec![("all", vec![true; records.len()])];
        if spec.variable == SweepVariable::Sigma {
            let mask = records
                .iter()
                .map(|r| {
                    spec.point(r.value)
                        .map(|(p, s)| InvertedOscillator::new(&p).linearization_argument(s) < LINEARIZED_FIT_LIMIT)
                        .unwrap_or(false)
                })
                .collect();
            windows.push(("linearized", mask));
        }
        for (kind, mask) in windows {
            let (xs, ys): (Vec<f64>, Vec<f64>) = records
                .iter()
                .zip(&col)
                .zip(&mask)
                .filter_map(|((r, y), &m)| match (m, y) {
                    (true, Some(y)) if *y > 0.0 => Some((r.value, *y)),
                    _ => None,
                })
                .unzip();
            if xs.len() >= 2 {
                if let Ok(fit) = fit_power_law(&xs, &ys) {
                    fits.push(NamedFit {
                        output,
                        window_kind: kind.into(),
                        fit,
                    });
                }
            }
        }
    }
    Ok(SweepSummary {
        rows: records.len(),
        rows_with_errors: records.iter().filter(|r| !r.errors.is_empty()).count(),
        fits,
        trends,
    })
}

pub fn sweep_table(cfg: &RunConfig, records: &[SweepRecord], outputs: &[SweepOutput]) -> CsvTable {
    let mut cols: Vec<String> = ["value", "sigma", "hbar", "omega"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for &o in outputs {
        cols.push(output_name(o).into());
        if o == SweepOutput::DensityProbe {
            cols.push("log_density_probe".into());
        }
    }
    cols.push("errors".into());
    let mut table = CsvTable::new(&cols).with_config(cfg);
    for r in records {
        let mut row: Vec<String> = [r.value, r.sigma, r.hbar, r.omega]
            .iter()
            .map(|&x| format_number(x))
            .collect();
        for &o in outputs {
            let v = match o {
                SweepOutput::TipExact => r.t_tip_exact,
                SweepOutput::TipApprox => r.t_tip_approx,
                SweepOutput::TipNumeric => r.t_tip_numeric,
                SweepOutput::ValidityRatio => r.validity_ratio,
                SweepOutput::UncertaintyProduct => r.uncertainty_product,
                SweepOutput::DensityProbe => r.density_probe,
            };
            row.push(format_optional(v));
            if o == SweepOutput::DensityProbe {
                row.push(format_optional(r.log_density_probe));
            }
        }
        row.push(r.errors.join("; "));
        table.push_row(row);
    }
    table
}

/// Parameter sweep: CSV table, JSON fits and trends, SVG plot.
pub fn sweep(cfg: &RunConfig) -> CmdResult<Outcome> {
    let spec = cfg
        .sweep_spec()
        .ok_or_else(|| ConfigError::single("sweep needs sweep_variable and sweep values"))?;
    let mut art = Artifacts::new(cfg.out.as_deref())?;
    art.require_dir("sweep")?;
    let records = run_sweep(&spec, cfg.jobs)?;
    art.write("sweep.csv", &sweep_table(cfg, &records, &spec.outputs).render())?;
    let summary = summarize_sweep(cfg, &records)?;
    let doc = json_document(cfg, "sweep", &summary);
    art.write("sweep.json", &doc)?;

    let var = match spec.variable {
        SweepVariable::Sigma => "sigma",
        SweepVariable::Omega => "omega",
        SweepVariable::Hbar => "hbar",
    };
    let mut chart = LineChart::new(format!("sweep over {var}"), var, "value").log_axes(true, true);
    for &o in &spec.outputs {
        let ys = match o {
            SweepOutput::DensityProbe => records.iter().map(|r| r.density_probe).collect(),
            _ => column(&records, o),
        };
        let pts = records
            .iter()
            .zip(ys)
            .map(|(r, y)| (r.value, y.unwrap_or(f64::NAN)))
            .collect();
        chart.push(Series::new(output_name(o), pts));
    }
    art.write("sweep.svg", &chart.render())?;
    Ok(Outcome {
        stdout: doc,
        files: art.files,
        passed: true,
    })
}
