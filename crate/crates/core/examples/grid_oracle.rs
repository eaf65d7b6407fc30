//! Crank-Nicolson evolution in the full cos(theta) potential between the
//! walls, with its conserved quantities.

use rodtip::oracle::{NumericOptions, PotentialKind};
use rodtip::{GaussianState, GridSolver, InvertedOscillator, RodParameters};

fn main() -> rodtip::Result<()> {
    let params = RodParameters::natural(0.01)?;
    let state = GaussianState::new(0.1)?;
    let model = InvertedOscillator::new(&params);
    let solver = GridSolver::new(&params, &NumericOptions::default())?;
    let h = solver.hamiltonian();
    let mut wf = solver.initial(&state)?;
    let (n0, e0) = (wf.norm(), h.energy(&wf));
    println!("n = {}, dt = {:.4e}", solver.grid().n_points(), solver.dt());
    for _ in 0..8 {
        solver.advance(&mut wf, 0.125)?;
        println!(
            "t = {:.3}: norm drift {:.2e}, energy drift {:.2e}, parity {:.2e}, P(sigma) grid {:.6} / closed form {:.6}",
            wf.time,
            wf.norm() - n0,
            (h.energy(&wf) - e0) / e0,
            wf.parity_defect(),
            wf.density_at(0.1),
            model.density_analytic(&state, 0.1, wf.time)?
        );
    }
    for kind in [PotentialKind::FullCosine, PotentialKind::Quadratic] {
        let opts = NumericOptions {
            potential: kind,
            ..NumericOptions::default()
        };
        let tip = GridSolver::new(&params, &opts)?.tipping_time(&state, model.validity_window())?;
        println!("{kind:?}: numeric t_tip {:.6} after {} steps", tip.t_tip, tip.steps);
    }
    Ok(())
}
