//! Tipping time of a rod in natural units, across regimes.
//!
//! ```text
//! cargo run --example tipping_time
//! ```

use rodtip::{InvertedOscillator, RodParameters};

fn main() -> rodtip::Result<()> {
    let sigma = 0.1;
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>10} {:>13}",
        "hbar", "exact", "quantum", "linearized", "validity", "regime"
    );
    for hbar in [10.0, 1.0, 0.1, 0.01, 1e-3, 1e-6] {
        let model = InvertedOscillator::new(&RodParameters::natural(hbar)?);
        let r = model.tipping_report(sigma)?;
        println!(
            "{hbar:>8} {:>14.8} {:>14.8} {:>14.6e} {:>10.2e} {:>13?}",
            r.t_tip_exact, r.t_tip_quantum_approx, r.t_tip_linearized, r.validity.ratio, r.regime
        );
    }

    // a 14 cm, 5 g pencil in SI units
    let rod = RodParameters::si(0.005, 0.07, 9.81)?;
    let model = InvertedOscillator::new(&rod);
    let t = model.tipping_time_exact(1e-16)?;
    println!(
        "\nSI rod, sigma = 1e-16 rad: t_tip = {t:.3} s (regime {:?})",
        model.derived().regime()
    );
    Ok(())
}
