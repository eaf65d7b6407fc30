//! As hbar -> 0 with sigma ~ sqrt(hbar), the density away from the vertical
//! collapses: the rod stays up.

use rodtip::analysis::{run_sweep, SigmaScaling, SweepOutput, SweepSpec, SweepVariable};
use rodtip::RodParameters;

fn main() -> rodtip::Result<()> {
    let hbars: Vec<f64> = (0..=20).map(|k| 2f64.powi(-k)).collect();
    let mut spec = SweepSpec::new(SweepVariable::Hbar, hbars, RodParameters::natural(1.0)?, 0.3);
    spec.sigma_scaling = SigmaScaling::SqrtHbar;
    spec.outputs = vec![SweepOutput::DensityProbe, SweepOutput::TipExact];
    spec.probe = Some((0.3, 0.1));
    for r in run_sweep(&spec, None)? {
        println!(
            "hbar {:>10.3e}  sigma {:>9.3e}  P(0.3, 0.1) {:>11.4e}  ln P {:>13.4}  t_tip {:.6}",
            r.hbar,
            r.sigma,
            r.density_probe.unwrap(),
            r.log_density_probe.unwrap(),
            r.t_tip_exact.unwrap()
        );
    }
    Ok(())
}
