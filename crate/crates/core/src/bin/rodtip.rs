use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rodtip::analysis::{SigmaScaling, SweepOutput, SweepVariable};
use rodtip::commands::{self, CommandError};
use rodtip::config::{Engine, RunConfig, Settings, Spacing};
use rodtip::{PotentialKind, UnitsMode};

#[derive(Parser)]
#[command(name = "rodtip", version, about = "Tipping time of a quantum rod balanced upright")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact, approximate and linearized tipping times (JSON on stdout)
    Tiptime(Common),
    /// Wavefunction snapshots and density-vs-time curves
    Evolve(Common),
    /// Grid cross-check and invariant suite; exit code 1 on failure
    Validate(Common),
    /// Parameter sweep with power-law fits
    Sweep(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Si,
    Natural,
}

#[derive(Clone, Copy, ValueEnum)]
enum Potential {
    Cosine,
    Quadratic,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    Numeric,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariableArg {
    Sigma,
    Omega,
    Hbar,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    TipExact,
    TipApprox,
    TipNumeric,
    ValidityRatio,
    UncertaintyProduct,
    DensityProbe,
}

#[derive(Args)]
struct Common {
    /// Flat TOML file; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    units: Option<Units>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    half_length: Option<f64>,
    #[arg(long)]
    gravity: Option<f64>,
    /// Interior grid points
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Repeatable; analytic and numeric together mean both
    #[arg(long, value_enum)]
    engine: Vec<EngineArg>,
    #[arg(long, value_enum)]
    potential: Option<Potential>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Final time for evolve
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    snapshot_interval: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    theta_points: Option<Vec<f64>>,
    #[arg(long)]
    tolerance_full: Option<f64>,
    #[arg(long)]
    tolerance_quadratic: Option<f64>,
    #[arg(long, value_enum)]
    variable: Option<VariableArg>,
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Linear instead of logarithmic spacing for --from/--to
    #[arg(long)]
    linear: bool,
    #[arg(long, value_enum, value_delimiter = ',')]
    outputs: Option<Vec<OutputArg>>,
    /// Scale sigma with sqrt(hbar) in an hbar sweep
    #[arg(long)]
    sqrt_hbar_sigma: bool,
    #[arg(long)]
    probe_theta: Option<f64>,
    #[arg(long)]
    probe_t: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Settings {
        Settings {
            units_mode: self.units.map(|u| match u {
                Units::Si => UnitsMode::Si,
                Units::Natural => UnitsMode::Natural,
            }),
            mass: self.mass,
            half_length: self.half_length,
            gravity: self.gravity,
            hbar: self.hbar,
            sigma: self.sigma,
            grid: self.grid,
            dt: self.dt,
            potential: self.potential.map(|p| match p {
                Potential::Cosine => PotentialKind::FullCosine,
                Potential::Quadratic => PotentialKind::Quadratic,
            }),
            engine: self
                .engine
                .iter()
                .map(|e| match e {
                    EngineArg::Analytic => Engine::Analytic,
                    EngineArg::Numeric => Engine::Numeric,
                    EngineArg::Both => Engine::Both,
                })
                .reduce(Engine::merge),
            t: self.t,
            snapshot_interval: self.snapshot_interval,
            theta_points: self.theta_points.clone(),
            out: self.out.clone(),
            jobs: self.jobs,
            tolerance_full: self.tolerance_full,
            tolerance_quadratic: self.tolerance_quadratic,
            validity_threshold: None,
            sweep_variable: self.variable.map(|v| match v {
                VariableArg::Sigma => SweepVariable::Sigma,
                VariableArg::Omega => SweepVariable::Omega,
                VariableArg::Hbar => SweepVariable::Hbar,
            }),
            sweep_values: self.values.clone(),
            sweep_from: self.from,
            sweep_to: self.to,
            sweep_points: self.points,
            sweep_spacing: self.linear.then_some(Spacing::Linear),
            sweep_outputs: self.outputs.as_ref().map(|os| {
                os.iter()
                    .map(|o| match o {
                        OutputArg::TipExact => SweepOutput::TipExact,
                        OutputArg::TipApprox => SweepOutput::TipApprox,
                        OutputArg::TipNumeric => SweepOutput::TipNumeric,
                        OutputArg::ValidityRatio => SweepOutput::ValidityRatio,
                        OutputArg::UncertaintyProduct => SweepOutput::UncertaintyProduct,
                        OutputArg::DensityProbe => SweepOutput::DensityProbe,
                    })
                    .collect()
            }),
            sweep_sigma_scaling: self.sqrt_hbar_sigma.then_some(SigmaScaling::SqrtHbar),
            probe_theta: self.probe_theta,
            probe_t: self.probe_t,
        }
    }
}

type Op = fn(&RunConfig) -> Result<commands::Outcome, CommandError>;

fn run(cli: Cli) -> Result<commands::Outcome, CommandError> {
    let (common, op): (&Common, Op) = match &cli.command {
        Command::Tiptime(c) => (c, commands::tiptime),
        Command::Evolve(c) => (c, commands::evolve),
        Command::Validate(c) => (c, commands::validate),
        Command::Sweep(c) => (c, commands::sweep),
    };
    let cfg = RunConfig::load(common.config.as_deref(), common.overrides())?;
    op(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { commands::EXIT_CONFIG } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if !outcome.passed {
                eprintln!("validation failed");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
