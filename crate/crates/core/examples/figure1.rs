//! Density-versus-time curves at fixed angles, written as an SVG chart.
//!
//! ```text
//! cargo run --example figure1 -- figure1.svg
//! ```

use rodtip::analysis::figure1_curves;
use rodtip::optimize::lin_space;
use rodtip::svg::{LineChart, Series};
use rodtip::{GaussianState, InvertedOscillator, RodParameters};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "figure1.svg".into());
    let model = InvertedOscillator::new(&RodParameters::natural(0.1)?);
    let state = GaussianState::new(0.3)?;
    let times = lin_space(0.0, 2.2, 441);
    let surface = figure1_curves(&model, &state, &[0.0, 0.3, 0.5, 0.7], &times)?;

    let mut chart = LineChart::new("P(theta, t), sigma = 0.3", "t", "P");
    for c in &surface.curves {
        let shape = if c.theta == 0.0 {
            format!("decreasing: {}", c.strictly_decreasing)
        } else {
            format!(
                "unimodal: {}, peak at t = {:.4}",
                c.unimodal,
                c.peak_time.unwrap_or(f64::NAN)
            )
        };
        println!("theta = {}: {shape}", c.theta);
        chart.push(Series::new(
            format!("theta = {}", c.theta),
            times.iter().copied().zip(c.values.clone()).collect(),
        ));
    }
    println!("peak times ordered in |theta|: {}", surface.peaks_ordered);
    std::fs::write(&path, chart.render())?;
    println!("wrote {path}");
    Ok(())
}
