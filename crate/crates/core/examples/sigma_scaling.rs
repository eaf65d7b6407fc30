//! Quadratic growth of the tipping time with the initial width in the deep
//! quantum regime, and where it bends over.

use rodtip::analysis::{fit_power_law, run_sweep, SweepOutput, SweepSpec, SweepVariable};
use rodtip::optimize::log_space;
use rodtip::RodParameters;

fn main() -> rodtip::Result<()> {
    for (lo, hi) in [(0.01, 0.05), (0.1, 0.5), (0.3, 1.2)] {
        let mut spec = SweepSpec::new(
            SweepVariable::Sigma,
            log_space(lo, hi, 25),
            RodParameters::natural(1.0)?,
            0.1,
        );
        spec.outputs = vec![SweepOutput::TipExact];
        let rows = run_sweep(&spec, None)?;
        let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.t_tip_exact.unwrap()).collect();
        let fit = fit_power_law(&xs, &ys)?;
        println!(
            "sigma in [{lo}, {hi}]: exponent {:.4}, r^2 {:.6}",
            fit.exponent, fit.r_squared
        );
    }
    Ok(())
}
