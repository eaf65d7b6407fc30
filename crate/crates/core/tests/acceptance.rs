//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rodtip::analysis::{
    cross_validate, figure1_curves, fit_power_law, run_sweep, CrossValidationOptions, SigmaScaling, SweepOutput,
    SweepSpec, SweepVariable,
};
use rodtip::optimize::{lin_space, log_space};
use rodtip::oracle::{GridSolver, NumericOptions, PotentialKind};
use rodtip::{GaussianState, InvertedOscillator, Regime, RodParameters};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..n {
        s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Tipping time equals the located density peak at θ = σ, 50 random draws.
fn formula_consistency() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x7159);
    let mut worst = 0.0f64;
    let mut draws = 0;
    while draws < 50 {
        let m: f64 = rng.random_range(0.5..2.0);
        let a: f64 = rng.random_range(0.5..2.0);
        let g: f64 = rng.random_range(1.0..20.0);
        let omega = (g / a).sqrt();
        let lambda = rng.random_range(1.5..10.0);
        let hbar = lambda * m * a * a * omega;
        let sigma = rng.random_range(0.02..0.3);
        let params = RodParameters::new(m, a, g, hbar).unwrap();
        let model = InvertedOscillator::new(&params);
        if model.derived().regime() != Regime::Quantum {
            continue;
        }
        let state = GaussianState::new(sigma).unwrap();
        let exact = model.tipping_time_exact(sigma).unwrap();
        let peak = model.density_peak_time(&state, sigma).unwrap();
        worst = worst.max(((peak - exact) / exact).abs());
        draws += 1;
    }
    verdict(
        worst <= 1e-8,
        format!("max relative difference {worst:.3e} over {draws} draws (limit 1e-8)"),
    )
}

/// Grid oracle against the closed form at the headline parameters.
fn oracle_agreement() -> Verdict {
    let params = RodParameters::natural(0.01).unwrap();
    let options = CrossValidationOptions {
        n_points: 1024,
        ..CrossValidationOptions::default()
    };
    let r = cross_validate(&params, 0.1, &options).unwrap();
    let ok = r.full.t_tip_relative_error <= 0.05
        && r.full.density_error_tip <= 0.05
        && r.quadratic.t_tip_relative_error <= 0.01
        && r.quadratic.density_error_tip <= 0.01;
    verdict(
        ok,
        format!(
            "t_tip exact {:.10}; cosine: t rel {:.3e}, density Linf {:.3e} (limit 5e-2); quadratic: t rel {:.3e}, density Linf {:.3e} (limit 1e-2)",
            r.t_tip_exact,
            r.full.t_tip_relative_error,
            r.full.density_error_tip,
            r.quadratic.t_tip_relative_error,
            r.quadratic.density_error_tip
        ),
    )
}

/// Norm of the closed-form state over the line while the validity ratio is
/// below 0.1, and grid norm drift over complete evolutions.
fn unitarity() -> Verdict {
    let mut worst_analytic = 0.0f64;
    let mut worst_leak = 0.0f64;
    for (hbar, sigma) in [(0.01, 0.1), (0.01, 0.3), (0.1, 0.1), (1.0, 0.05), (1.0, 0.3)] {
        let model = InvertedOscillator::new(&RodParameters::natural(hbar).unwrap());
        let state = GaussianState::new(sigma).unwrap();
        let t_max = model.validity_window();
        for t in lin_space(0.0, t_max, 41) {
            let v = model.validity(t);
            if !(v.ratio < 0.1) && t > 0.0 {
                continue;
            }
            let s = (model.log_density_analytic(&state, 0.0, t).unwrap().exp() * PI.sqrt()).recip();
            let half = 14.0 * s;
            let amp2 = |th: f64| model.amplitude_analytic(&state, th, t).unwrap().norm_sqr();
            let norm = simpson(amp2, -half, half, 20_000);
            worst_analytic = worst_analytic.max((norm - 1.0).abs());
            let inside = simpson(amp2, -FRAC_PI_2, FRAC_PI_2, 20_000);
            worst_leak = worst_leak.max(norm - inside);
        }
    }
    let mut worst_numeric = 0.0f64;
    for (hbar, sigma, kind) in [
        (0.01, 0.1, PotentialKind::FullCosine),
        (0.01, 0.1, PotentialKind::Quadratic),
        (1.0, 0.1, PotentialKind::FullCosine),
    ] {
        let params = RodParameters::natural(hbar).unwrap();
        let model = InvertedOscillator::new(&params);
        let solver = GridSolver::new(
            &params,
            &NumericOptions {
                potential: kind,
                ..NumericOptions::default()
            },
        )
        .unwrap();
        let mut wf = solver.initial(&GaussianState::new(sigma).unwrap()).unwrap();
        let n0 = wf.norm();
        solver.advance(&mut wf, model.validity_window()).unwrap();
        worst_numeric = worst_numeric.max((wf.norm() - n0).abs());
    }
    verdict(
        worst_analytic <= 1e-4 && worst_numeric <= 1e-8,
        format!(
            "closed-form norm deviation {worst_analytic:.3e} (limit 1e-4); grid norm drift {worst_numeric:.3e} (limit 1e-8); probability past the walls up to {worst_leak:.3e}"
        ),
    )
}

/// The propagator at Ωt = 1e-4 reproduces smooth test states.
fn delta_limit() -> Verdict {
    let params = RodParameters::natural(0.01).unwrap();
    let model = InvertedOscillator::new(&params);
    let t = 1e-4 / model.growth_rate();
    type State = Box<dyn Fn(f64) -> Complex64>;
    let states: Vec<(&str, State)> = vec![
        (
            "gaussian 0.1",
            Box::new(|x: f64| Complex64::new((-x * x / 0.02).exp(), 0.0)),
        ),
        (
            "shifted 0.15",
            Box::new(|x: f64| Complex64::new((-(x - 0.2).powi(2) / 0.045).exp(), 0.0)),
        ),
        (
            "boosted 0.2",
            Box::new(|x: f64| Complex64::from_polar((-x * x / 0.08).exp(), 20.0 * x)),
        ),
    ];
    let nodes = lin_space(-1.2, 1.2, 257);
    let mut worst = 0.0f64;
    for (_, f) in &states {
        let (mut num, mut den) = (0.0, 0.0);
        for &th in &nodes {
            let g = model.propagate_by_quadrature(f, th, t).unwrap();
            num += (g - f(th)).norm_sqr();
            den += f(th).norm_sqr();
        }
        worst = worst.max((num / den).sqrt());
    }
    verdict(
        worst < 1e-3,
        format!(
            "worst relative L2 error {worst:.3e} over {} states (limit 1e-3)",
            states.len()
        ),
    )
}

/// Log-log slope of t_tip against σ at ħ = 1.
fn sigma_squared_scaling() -> Verdict {
    let params = RodParameters::natural(1.0).unwrap();
    let mut spec = SweepSpec::new(SweepVariable::Sigma, log_space(0.01, 0.05, 21), params, 0.1);
    spec.outputs = vec![SweepOutput::TipExact, SweepOutput::TipApprox];
    let rows = run_sweep(&spec, None).unwrap();
    let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let exact: Vec<f64> = rows.iter().map(|r| r.t_tip_exact.unwrap()).collect();
    let approx: Vec<f64> = rows.iter().map(|r| r.t_tip_approx.unwrap()).collect();
    let fe = fit_power_law(&xs, &exact).unwrap();
    let fa = fit_power_law(&xs, &approx).unwrap();
    let ok = |f: &rodtip::analysis::ScalingFit| (f.exponent - 2.0).abs() <= 0.05 && f.r_squared > 0.999;
    verdict(
        ok(&fe) && ok(&fa),
        format!(
            "exact: exponent {:.6}, r2 {:.9}; quantum approx: exponent {:.6}, r2 {:.9} (need 2.00 +- 0.05, r2 > 0.999)",
            fe.exponent, fe.r_squared, fa.exponent, fa.r_squared
        ),
    )
}

/// t_tip strictly decreasing over 100 values of ω spanning two decades.
fn omega_monotonicity() -> Verdict {
    let params = RodParameters::natural(0.01).unwrap();
    let spec = SweepSpec::new(SweepVariable::Omega, log_space(0.1, 10.0, 100), params, 0.1);
    let rows = run_sweep(&spec, None).unwrap();
    let t: Vec<f64> = rows.iter().map(|r| r.t_tip_exact.unwrap()).collect();
    let violations = t.windows(2).filter(|w| !(w[1] < w[0])).count();
    verdict(
        violations == 0 && t.len() == 100,
        format!(
            "{} rows, {violations} non-decreasing steps, t_tip from {:.4e} to {:.4e}",
            t.len(),
            t[0],
            t[99]
        ),
    )
}

/// P(0.3, t0) along ħ_k = 2^-k with σ_k = σ0 2^(-k/2).
fn classical_limit() -> Verdict {
    let (sigma0, theta0, t0) = (0.3, 0.3, 0.1);
    let hbars: Vec<f64> = (0..=20).map(|k| 2f64.powi(-k)).collect();
    let mut spec = SweepSpec::new(SweepVariable::Hbar, hbars, RodParameters::natural(1.0).unwrap(), sigma0);
    spec.sigma_scaling = SigmaScaling::SqrtHbar;
    spec.outputs = vec![SweepOutput::DensityProbe];
    spec.probe = Some((theta0, t0));
    let rows = run_sweep(&spec, None).unwrap();
    let logp: Vec<f64> = rows.iter().map(|r| r.log_density_probe.unwrap()).collect();
    let decreasing = logp.windows(2).all(|w| w[1] < w[0]);
    let last = rows.last().unwrap().density_probe.unwrap();
    verdict(
        decreasing && last < 1e-6,
        format!(
            "ln P from {:.4} (k=0) to {:.4} (k=20), strictly decreasing: {decreasing}; P at k=20 = {last:.3e} (limit 1e-6)",
            logp[0], logp[20]
        ),
    )
}

/// Δθ·Δl/ħ with Δl = Iσ/t_tip in the linearized regime.
fn uncertainty_product() -> Verdict {
    let hbar = 0.01;
    let model = InvertedOscillator::new(&RodParameters::natural(hbar).unwrap());
    let mut lines = Vec::new();
    let mut ok = true;
    for sigma in [0.02, 0.035, 0.05] {
        let arg = model.linearization_argument(sigma);
        let exact = model
            .uncertainty_product(sigma, model.tipping_time_exact(sigma).unwrap())
            .unwrap()
            / hbar;
        let lin = model
            .uncertainty_product(sigma, model.tipping_time_linearized(sigma).unwrap())
            .unwrap()
            / hbar;
        ok &= arg < 0.3 && (0.5..=2.0).contains(&exact) && (lin - 1.0).abs() < 1e-12;
        lines.push(format!(
            "sigma {sigma}: argument {arg:.3}, exact {exact:.6}, linearized {lin:.15}"
        ));
    }
    verdict(ok, lines.join("; "))
}

/// Density-versus-time curves at σ = 0.3.
fn figure_shape() -> Verdict {
    let model = InvertedOscillator::new(&RodParameters::natural(0.1).unwrap());
    let state = GaussianState::new(0.3).unwrap();
    let times = lin_space(0.0, 2.2, 441);
    let s = figure1_curves(&model, &state, &[0.0, 0.3, 0.5, 0.7], &times).unwrap();
    let peaks: Vec<String> = s
        .curves
        .iter()
        .filter_map(|c| c.peak_time.map(|t| format!("{}: {t:.4}", c.theta)))
        .collect();
    verdict(
        s.has_expected_shape(),
        format!(
            "theta=0 decreasing: {}; others unimodal: {}; peak times {}",
            s.curve(0.0).unwrap().strictly_decreasing,
            s.curves.iter().filter(|c| c.theta != 0.0).all(|c| c.unimodal),
            peaks.join(", ")
        ),
    )
}

/// Classical and narrow-packet limits of the tipping time.
fn analytic_limits() -> Verdict {
    let base = InvertedOscillator::new(&RodParameters::natural(1.0).unwrap());
    let i_omega = base.inertia() * base.growth_rate();
    let model = InvertedOscillator::new(&RodParameters::natural(1e-12 * i_omega).unwrap());
    let target = (1.0 + 2f64.sqrt()).ln() / model.growth_rate();
    let classical = ((model.tipping_time_exact(0.1).unwrap() - target) / target).abs();

    let model = InvertedOscillator::new(&RodParameters::natural(0.01).unwrap());
    let ratios: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&s| model.tipping_time_exact(s).unwrap() / model.tipping_time_linearized(s).unwrap())
        .collect();
    let narrow = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let shrinking = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    verdict(
        classical <= 1e-10 && narrow < 1e-4 && shrinking,
        format!(
            "hbar -> 0: relative offset from ln(1+sqrt2)/Omega {classical:.3e} (limit 1e-10); sigma -> 0: t_tip / (I sigma^2/hbar) - 1 = {:.3e}, {:.3e}, {:.3e}",
            ratios[0] - 1.0,
            ratios[1] - 1.0,
            ratios[2] - 1.0
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("formula consistency", formula_consistency),
        ("oracle agreement", oracle_agreement),
        ("unitarity", unitarity),
        ("delta limit", delta_limit),
        ("sigma^2 scaling", sigma_squared_scaling),
        ("omega monotonicity", omega_monotonicity),
        ("classical limit", classical_limit),
        ("uncertainty product", uncertainty_product),
        ("figure-1 shape", figure_shape),
        ("analytic limits", analytic_limits),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {name:<20} {tag}  ({:.2}s) {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
        failed += usize::from(!v.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
