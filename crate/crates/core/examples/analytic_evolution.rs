//! Closed-form evolution of the Gaussian: width, density at the origin and
//! at theta = sigma, and where the propagator stops being trustworthy.

use rodtip::optimize::lin_space;
use rodtip::{AngularGrid, GaussianState, InvertedOscillator, RodParameters};

fn main() -> rodtip::Result<()> {
    let model = InvertedOscillator::new(&RodParameters::natural(0.01)?);
    let state = GaussianState::new(0.1)?;
    let grid = AngularGrid::new(1024)?;
    let t_tip = model.tipping_time_exact(0.1)?;
    println!(
        "t_tip = {t_tip:.10}, validity window ends at t = {:.4}",
        model.validity_window()
    );
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>10}",
        "t", "P(0,t)", "P(sigma,t)", "<theta^2>", "ratio"
    );
    for t in lin_space(0.0, 1.5 * t_tip, 13) {
        let wf = model.evolve_analytic(&state, t, &grid)?;
        println!(
            "{t:>8.4} {:>12.6} {:>12.6} {:>12.6e} {:>10.4}",
            model.density_analytic(&state, 0.0, t)?,
            model.density_analytic(&state, 0.1, t)?,
            wf.expectation(|x| x * x),
            model.validity(t).ratio
        );
    }
    Ok(())
}
