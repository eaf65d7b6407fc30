//! The propagator tends to a delta function as t -> 0: applying it by
//! quadrature at Omega t = 1e-4 returns the input state.

use num_complex::Complex64;
use rodtip::optimize::lin_space;
use rodtip::{InvertedOscillator, RodParameters};

fn main() -> rodtip::Result<()> {
    let model = InvertedOscillator::new(&RodParameters::natural(0.01)?);
    let f = |x: f64| Complex64::from_polar((-(x - 0.1).powi(2) / 0.03).exp(), 10.0 * x);
    for omega_t in [1e-1, 1e-2, 1e-3, 1e-4] {
        let t = omega_t / model.growth_rate();
        let (mut num, mut den) = (0.0, 0.0);
        for th in lin_space(-1.0, 1.0, 201) {
            num += (model.propagate_by_quadrature(f, th, t)? - f(th)).norm_sqr();
            den += f(th).norm_sqr();
        }
        println!("Omega t = {omega_t:e}: relative L2 change {:.3e}", (num / den).sqrt());
    }
    let g = model.propagator(0.0, 0.0, 0.5)?;
    println!(
        "G(0, 0, 0.5) = {g:.6}, phase {:.6} (expect -pi/4 = {:.6})",
        g.arg(),
        -std::f64::consts::FRAC_PI_4
    );
    Ok(())
}
