//! Run configuration: a flat TOML file merged with command-line overrides,
//! validated in one pass so that every problem is reported together.
//!
//! ```toml
//! units_mode = "natural"
//! hbar = 0.01
//! sigma = 0.1
//! grid = 1024
//! potential = "cosine"
//! ```

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{SigmaScaling, SweepOutput, SweepSpec, SweepVariable};
use crate::grid::MIN_GRID_POINTS;
use crate::optimize::{lin_space, log_space};
use crate::oracle::{NumericOptions, PotentialKind, DEFAULT_GRID_POINTS};
use crate::params::{RodParameters, UnitsMode, CODATA_HBAR};
use crate::semiclassical::{ValidityPolicy, DEFAULT_VALIDITY_THRESHOLD};

/// ħ used in natural units when none is given.
pub const DEFAULT_NATURAL_HBAR: f64 = 0.01;
pub const DEFAULT_SIGMA: f64 = 0.1;
/// Standard gravity, the SI default.
pub const STANDARD_GRAVITY: f64 = 9.80665;
pub const MAX_SNAPSHOTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Analytic,
    Numeric,
    Both,
}

impl Engine {
    pub fn analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Engine::Numeric | Engine::Both)
    }

    /// Union of two selections.
    pub fn merge(self, other: Engine) -> Engine {
        if self == other {
            self
        } else {
            Engine::Both
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// All problems found while resolving a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    pub fn single(problem: impl Into<String>) -> Self {
        Self {
            problems: vec![problem.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} problem", self.problems.len())?;
        if self.problems.len() != 1 {
            write!(f, "s")?;
        }
        write!(f, "):")?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

macro_rules! settings {
    ($($field:ident : $ty:ty),* $(,)?) => {
        /// Unresolved settings; every key is optional. Field names are the
        /// config-file keys.
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct Settings {
            $(pub $field: Option<$ty>,)*
        }

        impl Settings {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            fn from_table(table: toml::Table, problems: &mut Vec<String>) -> Self {
                let mut s = Self::default();
                for (key, value) in table {
                    match key.as_str() {
                        $(stringify!($field) => match value.try_into::<$ty>() {
                            Ok(v) => s.$field = Some(v),
                            Err(e) => problems.push(format!("{key}: {}", e.to_string().trim())),
                        },)*
                        _ => problems.push(format!("unknown key `{key}`")),
                    }
                }
                s
            }

            /// Values in `over` win.
            pub fn overridden_by(self, over: Settings) -> Settings {
                Settings { $($field: over.$field.or(self.$field),)* }
            }
        }
    };
}

settings! {
    units_mode: UnitsMode,
    mass: f64,
    half_length: f64,
    gravity: f64,
    hbar: f64,
    sigma: f64,
    grid: usize,
    dt: f64,
    potential: PotentialKind,
    engine: Engine,
    t: f64,
    snapshot_interval: f64,
    theta_points: Vec<f64>,
    out: PathBuf,
    jobs: usize,
    tolerance_full: f64,
    tolerance_quadratic: f64,
    validity_threshold: f64,
    sweep_variable: SweepVariable,
    sweep_values: Vec<f64>,
    sweep_from: f64,
    sweep_to: f64,
    sweep_points: usize,
    sweep_spacing: Spacing,
    sweep_outputs: Vec<SweepOutput>,
    sweep_sigma_scaling: SigmaScaling,
    probe_theta: f64,
    probe_t: f64,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Settings, ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::single(format!("config file: {}", e.to_string().trim())))?;
        let mut problems = Vec::new();
        let s = Self::from_table(table, &mut problems);
        if problems.is_empty() {
            Ok(s)
        } else {
            Err(ConfigError { problems })
        }
    }

    pub fn load(path: &Path) -> Result<Settings, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::single(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Resolved sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub outputs: Vec<SweepOutput>,
    pub sigma_scaling: SigmaScaling,
    pub probe: Option<(f64, f64)>,
}

/// Fully validated configuration. Serializes to the record embedded in every
/// output file; `out` and `jobs` are left out because they do not affect
/// results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub units_mode: UnitsMode,
    pub parameters: RodParameters,
    pub sigma: f64,
    pub grid: usize,
    pub dt: Option<f64>,
    pub potential: PotentialKind,
    pub engine: Engine,
    pub t: Option<f64>,
    pub snapshot_interval: Option<f64>,
    pub theta_points: Option<Vec<f64>>,
    pub tolerance_full: f64,
    pub tolerance_quadratic: f64,
    pub validity_threshold: f64,
    pub sweep: Option<SweepConfig>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

fn check(problems: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        problems.push(msg());
    }
}

fn positive(problems: &mut Vec<String>, key: &str, v: Option<f64>) {
    if let Some(x) = v {
        check(problems, x.is_finite() && x > 0.0, || {
            format!("{key} must be positive and finite, got {x}")
        });
    }
}

impl RunConfig {
    pub fn resolve(s: Settings) -> Result<RunConfig, ConfigError> {
        let mut p = Vec::new();
        let units_mode = s.units_mode.unwrap_or(UnitsMode::Natural);

        let (mass, half_length, gravity, hbar) = match units_mode {
            UnitsMode::Natural => {
                for (key, v) in [("mass", s.mass), ("half_length", s.half_length), ("gravity", s.gravity)] {
                    check(&mut p, v.is_none(), || {
                        format!("{key} is fixed to 1 in natural units; remove it or set units_mode = \"si\"")
                    });
                }
                (1.0, 1.0, 1.0, s.hbar.unwrap_or(DEFAULT_NATURAL_HBAR))
            }
            UnitsMode::Si => {
                check(&mut p, s.mass.is_some(), || "mass is required in SI units".into());
                check(&mut p, s.half_length.is_some(), || {
                    "half_length is required in SI units".into()
                });
                (
                    s.mass.unwrap_or(f64::NAN),
                    s.half_length.unwrap_or(f64::NAN),
                    s.gravity.unwrap_or(STANDARD_GRAVITY),
                    s.hbar.unwrap_or(CODATA_HBAR),
                )
            }
        };
        positive(&mut p, "mass", s.mass);
        positive(&mut p, "half_length", s.half_length);
        positive(&mut p, "gravity", s.gravity);
        positive(&mut p, "hbar", Some(hbar));

        let sigma = s.sigma.unwrap_or(DEFAULT_SIGMA);
        // range checks on sigma are domain errors, raised by the library
        check(&mut p, sigma.is_finite(), || {
            format!("sigma must be finite, got {sigma}")
        });

        let grid = s.grid.unwrap_or(DEFAULT_GRID_POINTS);
        check(&mut p, grid >= MIN_GRID_POINTS, || {
            format!("grid must be at least {MIN_GRID_POINTS}, got {grid}")
        });
        positive(&mut p, "dt", s.dt);
        if let Some(t) = s.t {
            check(&mut p, t.is_finite() && t >= 0.0, || {
                format!("t must be non-negative and finite, got {t}")
            });
        }
        positive(&mut p, "snapshot_interval", s.snapshot_interval);
        if let (Some(t), Some(dt)) = (s.t, s.snapshot_interval) {
            if t.is_finite() && dt.is_finite() && dt > 0.0 {
                check(&mut p, t / dt <= MAX_SNAPSHOTS as f64, || {
                    format!("t / snapshot_interval exceeds {MAX_SNAPSHOTS} snapshots")
                });
            }
        }
        if let Some(thetas) = &s.theta_points {
            check(&mut p, !thetas.is_empty(), || "theta_points must not be empty".into());
            for &th in thetas {
                check(&mut p, th.is_finite() && th.abs() < FRAC_PI_2, || {
                    format!("theta point {th} lies outside (-pi/2, pi/2)")
                });
            }
        }
        if let Some(j) = s.jobs {
            check(&mut p, j >= 1, || "jobs must be at least 1".into());
        }
        let tolerance_full = s.tolerance_full.unwrap_or(0.05);
        let tolerance_quadratic = s.tolerance_quadratic.unwrap_or(0.01);
        let validity_threshold = s.validity_threshold.unwrap_or(DEFAULT_VALIDITY_THRESHOLD);
        for (key, v) in [
            ("tolerance_full", tolerance_full),
            ("tolerance_quadratic", tolerance_quadratic),
        ] {
            check(&mut p, v.is_finite() && v > 0.0 && v <= 1.0, || {
                format!("{key} must lie in (0, 1], got {v}")
            });
        }
        check(&mut p, validity_threshold > 0.0 && validity_threshold < 1.0, || {
            format!("validity_threshold must lie in (0, 1), got {validity_threshold}")
        });

        let parameters = RodParameters::new(mass, half_length, gravity, hbar);
        let sweep = resolve_sweep(&s, &mut p);

        if !p.is_empty() {
            return Err(ConfigError { problems: p });
        }
        let cfg = RunConfig {
            units_mode,
            parameters: parameters.expect("parameters checked above"),
            sigma,
            grid,
            dt: s.dt,
            potential: s.potential.unwrap_or(PotentialKind::FullCosine),
            engine: s.engine.unwrap_or_default(),
            t: s.t,
            snapshot_interval: s.snapshot_interval,
            theta_points: s.theta_points,
            tolerance_full,
            tolerance_quadratic,
            validity_threshold,
            sweep,
            out: s.out,
            jobs: s.jobs,
        };
        if let Some(spec) = cfg.sweep_spec() {
            spec.validate().map_err(|e| ConfigError::single(e.to_string()))?;
        }
        Ok(cfg)
    }

    /// Reads `path` (if any), applies `overrides`, and resolves.
    pub fn load(path: Option<&Path>, overrides: Settings) -> Result<RunConfig, ConfigError> {
        let base = match path {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        Self::resolve(base.overridden_by(overrides))
    }

    pub fn numeric_options(&self, potential: PotentialKind) -> NumericOptions {
        NumericOptions {
            n_points: self.grid,
            dt: self.dt,
            potential,
        }
    }

    pub fn validity_policy(&self) -> ValidityPolicy {
        ValidityPolicy {
            threshold: self.validity_threshold,
            ..ValidityPolicy::default()
        }
    }

    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        let sw = self.sweep.as_ref()?;
        let mut spec = SweepSpec::new(sw.variable, sw.values.clone(), self.parameters, self.sigma);
        spec.outputs = sw.outputs.clone();
        spec.sigma_scaling = sw.sigma_scaling;
        spec.probe = sw.probe;
        spec.numeric = self.numeric_options(self.potential);
        Some(spec)
    }
}

fn resolve_sweep(s: &Settings, p: &mut Vec<String>) -> Option<SweepConfig> {
    let range_given = s.sweep_from.is_some() || s.sweep_to.is_some() || s.sweep_points.is_some();
    let Some(variable) = s.sweep_variable else {
        check(p, s.sweep_values.is_none() && !range_given, || {
            "sweep values given without sweep_variable".into()
        });
        return None;
    };
    let values = match (&s.sweep_values, range_given) {
        (Some(_), true) => {
            p.push("give either sweep_values or sweep_from/sweep_to/sweep_points, not both".into());
            return None;
        }
        (Some(v), false) => v.clone(),
        (None, _) => {
            let (Some(from), Some(to)) = (s.sweep_from, s.sweep_to) else {
                p.push("sweep needs sweep_values or both sweep_from and sweep_to".into());
                return None;
            };
            let n = s.sweep_points.unwrap_or(20);
            if !(from.is_finite() && to.is_finite() && from != to) {
                p.push(format!(
                    "sweep_from and sweep_to must be finite and distinct, got {from} and {to}"
                ));
                return None;
            }
            if n < 2 {
                p.push(format!("sweep_points must be at least 2, got {n}"));
                return None;
            }
            match s.sweep_spacing.unwrap_or_default() {
                Spacing::Log if from > 0.0 && to > 0.0 => log_space(from, to, n),
                Spacing::Log => {
                    p.push("log spacing needs positive sweep_from and sweep_to".into());
                    return None;
                }
                Spacing::Linear => lin_space(from, to, n),
            }
        }
    };
    let probe = match (s.probe_theta, s.probe_t) {
        (Some(th), Some(t)) => Some((th, t)),
        (None, None) => None,
        _ => {
            p.push("probe_theta and probe_t must be given together".into());
            None
        }
    };
    let outputs = s.sweep_outputs.clone().unwrap_or_else(|| {
        let mut o = vec![
            SweepOutput::TipExact,
            SweepOutput::TipApprox,
            SweepOutput::ValidityRatio,
        ];
        if probe.is_some() {
            o.push(SweepOutput::DensityProbe);
        }
        o
    });
    Some(SweepConfig {
        variable,
        values,
        outputs,
        sigma_scaling: s.sweep_sigma_scaling.unwrap_or_default(),
        probe,
    })
}
