//! Grid solver against the closed form for a few widths and values of hbar.

use rodtip::analysis::{cross_validate, CrossValidationOptions};
use rodtip::RodParameters;

fn main() -> rodtip::Result<()> {
    let opts = CrossValidationOptions::default();
    println!(
        "{:>6} {:>6} {:>12} {:>11} {:>11} {:>11} {:>11} {:>6}",
        "hbar", "sigma", "t_tip", "cos t err", "cos P err", "quad t err", "quad P err", "pass"
    );
    for (hbar, sigma) in [(0.01, 0.1), (0.01, 0.2), (0.01, 0.3), (0.1, 0.1), (1.0, 0.05)] {
        let r = cross_validate(&RodParameters::natural(hbar)?, sigma, &opts)?;
        println!(
            "{hbar:>6} {sigma:>6} {:>12.8} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>6}",
            r.t_tip_exact,
            r.full.t_tip_relative_error,
            r.full.density_error_tip,
            r.quadratic.t_tip_relative_error,
            r.quadratic.density_error_tip,
            r.passed
        );
    }
    Ok(())
}
