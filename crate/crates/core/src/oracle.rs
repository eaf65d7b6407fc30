//! Grid solver for the time-dependent Schrödinger equation on the walled
//! interval, used as an independent check of the semiclassical formulas.
//!
//! `H = −(ħ²/2I) ∂²/∂θ² + V(θ)` with second-order central differences and
//! Dirichlet zeros at `±π/2`. Time stepping is the Cayley form
//! `ψ′ = (1 + iΔt H/2ħ)⁻¹ (1 − iΔt H/2ħ) ψ`, which is unitary for the discrete
//! `H` and so conserves `Σ|ψ_j|²` and `⟨H⟩` up to rounding.
//!
//! The Cayley map turns an energy `E` into the phase `2 atan(EΔt/2ħ)`, so
//! level spacings are compressed by `1/(1 + (EΔt/2ħ)²)`. Both potentials sit
//! near `V(0) = m g a`, which would make that compression large. The stepper
//! therefore measures energies from `V(0)` and puts the constant phase
//! `exp(−i V(0) Δt/ħ)` back exactly after every step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{AngularGrid, WaveFunction};
use crate::optimize::parabolic_vertex_offset;
use crate::params::{DerivedParameters, GaussianState, RodParameters};
use crate::tridiag::TridiagonalLu;

pub const DEFAULT_GRID_POINTS: usize = 1024;
/// Minimum number of nodes required inside `[−3σ, 3σ]`.
pub const MIN_NODES_PER_PACKET: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    /// `m g a cos θ`.
    #[serde(alias = "cosine", alias = "full")]
    FullCosine,
    /// `m g a (1 − θ²/2)`.
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    /// `m g a`.
    pub scale: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, params: &RodParameters) -> Self {
        Self {
            kind,
            scale: params.derive().potential_scale(),
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self.kind {
            PotentialKind::FullCosine => self.scale * theta.cos(),
            PotentialKind::Quadratic => self.scale * (1.0 - 0.5 * theta * theta),
        }
    }
}

/// Default `Δt = min(0.01/Ω, I Δθ²/ħ)`.
pub fn default_time_step(derived: &DerivedParameters, grid: &AngularGrid) -> f64 {
    let dtheta = grid.spacing();
    (0.01 / derived.growth_rate).min(derived.moment_of_inertia * dtheta * dtheta / derived.hbar())
}

/// Samples the initial Gaussian (exact normalization) on the grid and
/// rescales so the discrete norm is exactly one.
pub fn discretize_initial(state: &GaussianState, grid: &AngularGrid) -> Result<WaveFunction> {
    let nodes = grid.count_within(3.0 * state.sigma());
    if nodes < MIN_NODES_PER_PACKET {
        return Err(Error::GridTooCoarse {
            nodes,
            required: MIN_NODES_PER_PACKET,
        });
    }
    let amplitudes = grid
        .nodes()
        .iter()
        .map(|&t| Complex64::new(state.amplitude(t), 0.0))
        .collect();
    let mut wf = WaveFunction::new(grid.clone(), amplitudes, 0.0);
    wf.normalize();
    Ok(wf)
}

/// Discretized Hamiltonian, stored as `offset + (tridiagonal part)` with
/// `offset = V(0)`.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    offset: f64,
    off_diagonal: f64,
    diagonal: Vec<f64>,
}

impl GridHamiltonian {
    pub fn new(derived: &DerivedParameters, grid: &AngularGrid, potential: &PotentialSpec) -> Self {
        let dtheta = grid.spacing();
        let kinetic = derived.hbar().powi(2) / (2.0 * derived.moment_of_inertia * dtheta * dtheta);
        let offset = potential.value(0.0);
        Self {
            offset,
            off_diagonal: -kinetic,
            diagonal: grid
                .nodes()
                .iter()
                .map(|&t| 2.0 * kinetic + (potential.value(t) - offset))
                .collect(),
        }
    }

    /// Constant energy shift `V(0)` removed from the diagonal.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off_diagonal
    }

    /// Diagonal without the offset.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Full diagonal, `V(0)` included.
    pub fn full_diagonal(&self) -> Vec<f64> {
        self.diagonal.iter().map(|d| d + self.offset).collect()
    }

    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = psi.len();
        for j in 0..n {
            let mut s = psi[j] * (self.diagonal[j] + self.offset);
            if j > 0 {
                s += psi[j - 1] * self.off_diagonal;
            }
            if j + 1 < n {
                s += psi[j + 1] * self.off_diagonal;
            }
            out[j] = s;
        }
    }

    /// `⟨ψ|H|ψ⟩ Δθ`.
    pub fn energy(&self, wf: &WaveFunction) -> f64 {
        let mut h_psi = vec![Complex64::new(0.0, 0.0); wf.amplitudes.len()];
        self.apply(&wf.amplitudes, &mut h_psi);
        wf.grid.spacing()
            * wf.amplitudes
                .iter()
                .zip(&h_psi)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>()
    }
}

/// One Cayley step of fixed size, with the implicit matrix factored once.
#[derive(Debug, Clone)]
pub struct CayleyStepper {
    dt: f64,
    hamiltonian: GridHamiltonian,
    lu: TridiagonalLu,
    // explicit half: 1 − iΔt H / 2ħ
    rhs_off: Complex64,
    rhs_diag: Vec<Complex64>,
    // exp(−i V(0) Δt / ħ)
    offset_phase: Complex64,
}

impl CayleyStepper {
    pub fn new(derived: &DerivedParameters, grid: &AngularGrid, potential: &PotentialSpec, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeStep(dt));
        }
        let hamiltonian = GridHamiltonian::new(derived, grid, potential);
        let k = dt / (2.0 * derived.hbar());
        let n = grid.n_points();
        let off = Complex64::new(0.0, k * hamiltonian.off_diagonal());
        let lhs_diag: Vec<_> = hamiltonian
            .diagonal()
            .iter()
            .map(|&h| Complex64::new(1.0, k * h))
            .collect();
        let offs = vec![off; n - 1];
        let lu = TridiagonalLu::factor(&offs, &lhs_diag, &offs)?;
        let rhs_diag = lhs_diag.iter().map(|z| z.conj()).collect();
        Ok(Self {
            dt,
            lu,
            rhs_off: -off,
            rhs_diag,
            offset_phase: Complex64::from_polar(1.0, -hamiltonian.offset() * dt / derived.hbar()),
            hamiltonian,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn hamiltonian(&self) -> &GridHamiltonian {
        &self.hamiltonian
    }

    pub fn step_in_place(&self, wf: &mut WaveFunction, scratch: &mut Vec<Complex64>) {
        let psi = &wf.amplitudes;
        let n = psi.len();
        scratch.clear();
        scratch.extend((0..n).map(|j| {
            let mut s = psi[j] * self.rhs_diag[j];
            if j > 0 {
                s += psi[j - 1] * self.rhs_off;
            }
            if j + 1 < n {
                s += psi[j + 1] * self.rhs_off;
            }
            s
        }));
        self.lu.solve_in_place(scratch);
        for z in scratch.iter_mut() {
            *z *= self.offset_phase;
        }
        std::mem::swap(&mut wf.amplitudes, scratch);
        wf.time += self.dt;
    }
}

/// A single Cayley step of size `dt`.
pub fn step(
    wf: &WaveFunction,
    dt: f64,
    derived: &DerivedParameters,
    potential: &PotentialSpec,
) -> Result<WaveFunction> {
    let stepper = CayleyStepper::new(derived, &wf.grid, potential, dt)?;
    let mut next = wf.clone();
    let mut scratch = Vec::with_capacity(wf.amplitudes.len());
    stepper.step_in_place(&mut next, &mut scratch);
    Ok(next)
}

/// Numerical evolution settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericOptions {
    pub n_points: usize,
    /// `None` picks [`default_time_step`].
    pub dt: Option<f64>,
    pub potential: PotentialKind,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_GRID_POINTS,
            dt: None,
            potential: PotentialKind::FullCosine,
        }
    }
}

/// Grid solver bound to one rod, grid and potential.
#[derive(Debug, Clone)]
pub struct GridSolver {
    derived: DerivedParameters,
    grid: AngularGrid,
    potential: PotentialSpec,
    dt: f64,
}

impl GridSolver {
    pub fn new(params: &RodParameters, options: &NumericOptions) -> Result<Self> {
        let derived = params.derive();
        let grid = AngularGrid::new(options.n_points)?;
        let dt = options.dt.unwrap_or_else(|| default_time_step(&derived, &grid));
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeStep(dt));
        }
        Ok(Self {
            derived,
            potential: PotentialSpec::new(options.potential, params),
            grid,
            dt,
        })
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn derived(&self) -> &DerivedParameters {
        &self.derived
    }

    pub fn stepper(&self) -> Result<CayleyStepper> {
        CayleyStepper::new(&self.derived, &self.grid, &self.potential, self.dt)
    }

    pub fn hamiltonian(&self) -> GridHamiltonian {
        GridHamiltonian::new(&self.derived, &self.grid, &self.potential)
    }

    pub fn initial(&self, state: &GaussianState) -> Result<WaveFunction> {
        discretize_initial(state, &self.grid)
    }

    /// Advances `wf` by `duration`: whole steps of `dt` and one shorter final
    /// step so the end time is hit exactly.
    pub fn advance(&self, wf: &mut WaveFunction, duration: f64) -> Result<()> {
        if duration < 0.0 {
            return Err(Error::NegativeTime(duration));
        }
        let start = wf.time;
        let full = (duration / self.dt).floor() as usize;
        let stepper = self.stepper()?;
        let mut scratch = Vec::with_capacity(wf.amplitudes.len());
        for _ in 0..full {
            stepper.step_in_place(wf, &mut scratch);
        }
        let rest = duration - full as f64 * self.dt;
        if rest > 1e-12 * self.dt {
            let last = CayleyStepper::new(&self.derived, &self.grid, &self.potential, rest)?;
            last.step_in_place(wf, &mut scratch);
        }
        wf.time = start + duration;
        Ok(())
    }

    pub fn evolve(&self, state: &GaussianState, t: f64) -> Result<WaveFunction> {
        let mut wf = self.initial(state)?;
        self.advance(&mut wf, t)?;
        Ok(wf)
    }

    /// Tipping time read off the grid evolution: `P(σ, t)` is recorded after
    /// every step up to `t_max`, and the largest sample is refined by a
    /// three-point parabola. The run stops early once the recorded density has
    /// fallen to half its running maximum.
    pub fn tipping_time(&self, state: &GaussianState, t_max: f64) -> Result<NumericTipping> {
        let sigma = state.sigma();
        let mut wf = self.initial(state)?;
        let norm0 = wf.norm();
        let stepper = self.stepper()?;
        let mut scratch = Vec::with_capacity(wf.amplitudes.len());
        let mut samples = vec![wf.density_at(sigma)];
        let mut best = 0usize;
        let steps_max = (t_max / self.dt).floor() as usize;
        for k in 1..=steps_max {
            stepper.step_in_place(&mut wf, &mut scratch);
            let p = wf.density_at(sigma);
            samples.push(p);
            if p > samples[best] {
                best = k;
            }
            if best > 0 && k > best + 2 && p < 0.5 * samples[best] {
                break;
            }
        }
        let norm_drift = (wf.norm() - norm0).abs();
        if best == 0 || best + 1 >= samples.len() {
            return Err(Error::NoNumericPeak { t_max });
        }
        let offset = parabolic_vertex_offset(samples[best - 1], samples[best], samples[best + 1]);
        Ok(NumericTipping {
            t_tip: (best as f64 + offset) * self.dt,
            peak_density: samples[best],
            steps: samples.len() - 1,
            norm_drift,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericTipping {
    pub t_tip: f64,
    pub peak_density: f64,
    pub steps: usize,
    pub norm_drift: f64,
}

/// Free-function form of [`GridSolver::evolve`].
pub fn evolve_numeric(
    state: &GaussianState,
    t: f64,
    params: &RodParameters,
    options: &NumericOptions,
) -> Result<WaveFunction> {
    GridSolver::new(params, options)?.evolve(state, t)
}

/// Free-function form of [`GridSolver::tipping_time`] with the window ending
/// where the semiclassical validity ratio reaches its default threshold.
pub fn tipping_time_numeric(
    state: &GaussianState,
    params: &RodParameters,
    options: &NumericOptions,
) -> Result<NumericTipping> {
    let window = crate::semiclassical::InvertedOscillator::new(params).validity_window();
    GridSolver::new(params, options)?.tipping_time(state, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(hbar: f64) -> RodParameters {
        RodParameters::natural(hbar).unwrap()
    }

    #[test]
    fn potentials_agree_to_taylor_remainder() {
        let p = natural(0.01);
        let full = PotentialSpec::new(PotentialKind::FullCosine, &p);
        let quad = PotentialSpec::new(PotentialKind::Quadratic, &p);
        for k in 0..=100 {
            let t = -1.5 + 0.03 * k as f64;
            let bound = full.scale * t.powi(4) / 24.0;
            assert!((full.value(t) - quad.value(t)).abs() <= bound + 1e-15);
        }
    }

    #[test]
    fn initial_state_is_normalized_real_and_even() {
        let grid = AngularGrid::new(1024).unwrap();
        let wf = discretize_initial(&GaussianState::new(0.1).unwrap(), &grid).unwrap();
        assert!((wf.norm() - 1.0).abs() < 1e-15);
        assert!(wf.amplitudes.iter().all(|z| z.im == 0.0));
        assert_eq!(wf.parity_defect(), 0.0);
        assert!(wf.mean_theta().abs() < 1e-14);
    }

    #[test]
    fn coarse_grid_rejected() {
        let grid = AngularGrid::new(64).unwrap();
        let err = discretize_initial(&GaussianState::new(0.01).unwrap(), &grid).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { required: 16, .. }));
    }

    #[test]
    fn step_rejects_bad_dt() {
        let p = natural(0.01);
        let grid = AngularGrid::new(128).unwrap();
        let wf = discretize_initial(&GaussianState::new(0.2).unwrap(), &grid).unwrap();
        let pot = PotentialSpec::new(PotentialKind::FullCosine, &p);
        assert!(matches!(
            step(&wf, 0.0, &p.derive(), &pot),
            Err(Error::InvalidTimeStep(_))
        ));
        assert!(matches!(
            step(&wf, -1.0, &p.derive(), &pot),
            Err(Error::InvalidTimeStep(_))
        ));
    }

    #[test]
    fn zero_duration_is_identity() {
        let p = natural(0.01);
        let solver = GridSolver::new(&p, &NumericOptions::default()).unwrap();
        let s = GaussianState::new(0.1).unwrap();
        assert_eq!(solver.evolve(&s, 0.0).unwrap(), solver.initial(&s).unwrap());
    }

    #[test]
    fn advance_lands_on_target_time() {
        let p = natural(0.01);
        let solver = GridSolver::new(
            &p,
            &NumericOptions {
                dt: Some(0.03),
                ..Default::default()
            },
        )
        .unwrap();
        let s = GaussianState::new(0.1).unwrap();
        let wf = solver.evolve(&s, 0.1).unwrap();
        assert_eq!(wf.time, 0.1);
    }

    #[test]
    fn norm_parity_and_energy_conserved() {
        let p = natural(0.01);
        let solver = GridSolver::new(
            &p,
            &NumericOptions {
                n_points: 256,
                ..Default::default()
            },
        )
        .unwrap();
        let s = GaussianState::new(0.1).unwrap();
        let mut wf = solver.initial(&s).unwrap();
        let h = solver.hamiltonian();
        let e0 = h.energy(&wf);
        let stepper = solver.stepper().unwrap();
        let mut scratch = Vec::new();
        for _ in 0..10_000 {
            stepper.step_in_place(&mut wf, &mut scratch);
        }
        assert!((wf.norm() - 1.0).abs() < 1e-8, "{}", wf.norm());
        assert!(wf.parity_defect() < 1e-12);
        assert!(((h.energy(&wf) - e0) / e0).abs() < 1e-6);
    }
}
