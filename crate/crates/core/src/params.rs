//! Physical parameters of the rod and the quantities derived from them.
//!
//! The rod has uniformly distributed mass `m`, its centre of mass sits a
//! distance `a` from the pivot, and it moves in the vertical plane under
//! gravity `g`. Everything downstream works with the derived set: moment of
//! inertia `I = 4/3 m a²`, pendulum frequency `ω = √(g/a)`, effective mass
//! `M = I/a²` and the inverted-oscillator growth rate `Ω = √(m/M) ω`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// CODATA 2018 reduced Planck constant, J·s.
pub const CODATA_HBAR: f64 = 1.054_571_817e-34;

/// `I / (m a²)` for a uniform rod pivoted at one end.
pub const KAPPA: f64 = 4.0 / 3.0;

/// Widths above this trigger a localization warning.
pub const SIGMA_WARN_THRESHOLD: f64 = 0.3;

/// λ_dB/a above this is the quantum regime.
pub const QUANTUM_THRESHOLD: f64 = 1.0;
/// λ_dB/a below this is the classical regime.
pub const CLASSICAL_THRESHOLD: f64 = 0.01;

fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { field, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitsMode {
    /// Everything in SI.
    Si,
    /// `m = a = g = 1`, ħ free.
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RodParameters {
    mass: f64,
    half_length: f64,
    gravity: f64,
    hbar: f64,
}

impl RodParameters {
    pub fn new(mass: f64, half_length: f64, gravity: f64, hbar: f64) -> Result<Self> {
        Ok(Self {
            mass: positive("mass", mass)?,
            half_length: positive("half_length", half_length)?,
            gravity: positive("gravity", gravity)?,
            hbar: positive("hbar", hbar)?,
        })
    }

    /// Natural units: `m = a = g = 1`.
    pub fn natural(hbar: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, hbar)
    }

    /// SI parameters with the CODATA value of ħ.
    pub fn si(mass: f64, half_length: f64, gravity: f64) -> Result<Self> {
        Self::new(mass, half_length, gravity, CODATA_HBAR)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.mass, self.half_length, self.gravity, hbar)
    }

    pub fn with_gravity(&self, gravity: f64) -> Result<Self> {
        Self::new(self.mass, self.half_length, gravity, self.hbar)
    }

    /// Same rod with the gravity chosen so that `ω = √(g/a)` equals `omega`.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        let omega = positive("omega", omega)?;
        self.with_gravity(omega * omega * self.half_length)
    }

    pub fn derive(&self) -> DerivedParameters {
        DerivedParameters::from_params(*self)
    }
}

/// Quantities that follow from [`RodParameters`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParameters {
    pub params: RodParameters,
    /// `I = 4/3 m a²`.
    pub moment_of_inertia: f64,
    /// `I / (m a²)`, always 4/3.
    pub kappa: f64,
    /// `ω = √(g/a)`.
    pub omega: f64,
    /// `M = I / a²`.
    pub effective_mass: f64,
    /// `Ω = √(m/M) ω = √(m g a / I)`.
    pub growth_rate: f64,
    /// `ħ / (m a² ω)`, the reduced de Broglie wavelength over `a`.
    pub de_broglie_ratio: f64,
}

impl DerivedParameters {
    fn from_params(params: RodParameters) -> Self {
        let m = params.mass;
        let a = params.half_length;
        let ma2 = m * a * a;
        let moment_of_inertia = KAPPA * ma2;
        let omega = (params.gravity / a).sqrt();
        let effective_mass = moment_of_inertia / (a * a);
        let growth_rate = (m / effective_mass).sqrt() * omega;
        Self {
            params,
            moment_of_inertia,
            kappa: moment_of_inertia / ma2,
            omega,
            effective_mass,
            growth_rate,
            de_broglie_ratio: params.hbar / (ma2 * omega),
        }
    }

    pub fn hbar(&self) -> f64 {
        self.params.hbar
    }

    /// `m g a`, the height of the potential maximum above the pivot.
    pub fn potential_scale(&self) -> f64 {
        let p = &self.params;
        p.mass * p.gravity * p.half_length
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.de_broglie_ratio)
    }
}

pub fn derive(params: &RodParameters) -> DerivedParameters {
    params.derive()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Quantum,
    Intermediate,
    Classical,
}

impl Regime {
    pub fn classify(de_broglie_ratio: f64) -> Self {
        if de_broglie_ratio > QUANTUM_THRESHOLD {
            Regime::Quantum
        } else if de_broglie_ratio < CLASSICAL_THRESHOLD {
            Regime::Classical
        } else {
            Regime::Intermediate
        }
    }
}

pub fn classical_regime(params: &RodParameters) -> Regime {
    params.derive().regime()
}

/// Initial wavefunction: a real Gaussian of width `σ` centred on the
/// vertical, normalized on `[-π/2, π/2]` with the exact error-function factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState {
    sigma: f64,
    normalization: f64,
}

impl GaussianState {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0 && sigma < FRAC_PI_2) {
            return Err(Error::SigmaOutOfRange(sigma));
        }
        if sigma > SIGMA_WARN_THRESHOLD {
            log::warn!(
                "sigma = {sigma} exceeds {SIGMA_WARN_THRESHOLD}; the state is not well localized near the vertical"
            );
        }
        let mass = PI.sqrt() * sigma * erf(FRAC_PI_2 / sigma);
        Ok(Self {
            sigma,
            normalization: mass.sqrt().recip(),
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn is_well_localized(&self) -> bool {
        self.sigma <= SIGMA_WARN_THRESHOLD
    }

    /// `ψ(θ, 0)`; zero outside the walls.
    pub fn amplitude(&self, theta: f64) -> f64 {
        if theta.abs() > FRAC_PI_2 {
            0.0
        } else {
            self.normalization * (-theta * theta / (2.0 * self.sigma * self.sigma)).exp()
        }
    }

    pub fn density(&self, theta: f64) -> f64 {
        let a = self.amplitude(theta);
        a * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_rod() {
        let d = RodParameters::natural(1.0).unwrap().derive();
        assert_relative_eq!(d.moment_of_inertia, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(d.omega, 1.0);
        assert_relative_eq!(d.effective_mass, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(d.growth_rate, 0.866_025_403_784_438_6, max_relative = 1e-15);
    }

    #[test]
    fn de_broglie_ratio_unit_denominator() {
        let d = RodParameters::natural(0.01).unwrap().derive();
        assert_relative_eq!(d.de_broglie_ratio, 0.01, max_relative = 1e-15);
    }

    #[test]
    fn heavier_rod_matches_high_precision_values() {
        // sqrt(19.6) and 4/3 * 2 * 0.25 evaluated with mpmath at 30 digits
        let d = RodParameters::new(2.0, 0.5, 9.8, 1.0).unwrap().derive();
        assert_relative_eq!(d.omega, 4.427_188_724_235_731, max_relative = 1e-15);
        assert_relative_eq!(d.moment_of_inertia, 0.666_666_666_666_666_6, max_relative = 1e-15);
    }

    #[test]
    fn growth_rate_is_sqrt3_over_2_omega() {
        for &(m, a, g) in &[(1.0, 1.0, 1.0), (3.7, 0.2, 9.81), (1e-28, 1e-9, 9.81)] {
            let d = RodParameters::new(m, a, g, 1.0).unwrap().derive();
            assert_relative_eq!(d.kappa, KAPPA, max_relative = 1e-15);
            assert_relative_eq!(d.growth_rate, 3f64.sqrt() / 2.0 * d.omega, max_relative = 1e-15);
            assert_relative_eq!(1.0 / d.growth_rate, d.kappa.sqrt() / d.omega, max_relative = 1e-15);
        }
    }

    #[test]
    fn quadrupling_gravity_doubles_frequencies() {
        let p = RodParameters::new(1.3, 0.7, 2.5, 0.1).unwrap();
        let d1 = p.derive();
        let d4 = p.with_gravity(4.0 * p.gravity()).unwrap().derive();
        assert_eq!(d4.omega, 2.0 * d1.omega);
        assert_eq!(d4.growth_rate, 2.0 * d1.growth_rate);
    }

    #[test]
    fn rejects_non_positive_fields_by_name() {
        let cases = [
            (RodParameters::new(0.0, 1.0, 1.0, 1.0), "mass"),
            (RodParameters::new(1.0, -1.0, 1.0, 1.0), "half_length"),
            (RodParameters::new(1.0, 1.0, f64::NAN, 1.0), "gravity"),
            (RodParameters::new(1.0, 1.0, 1.0, 0.0), "hbar"),
        ];
        for (res, name) in cases {
            match res {
                Err(Error::NonPositive { field, .. }) => assert_eq!(field, name),
                other => panic!("expected NonPositive({name}), got {other:?}"),
            }
        }
    }

    #[test]
    fn regime_thresholds() {
        assert_eq!(Regime::classify(10.0), Regime::Quantum);
        assert_eq!(Regime::classify(1e-6), Regime::Classical);
        assert_eq!(Regime::classify(0.5), Regime::Intermediate);
        assert_eq!(Regime::classify(1.0), Regime::Intermediate);
        assert_eq!(Regime::classify(0.01), Regime::Intermediate);
    }

    #[test]
    fn sigma_range() {
        assert!(GaussianState::new(0.0).is_err());
        assert!(GaussianState::new(FRAC_PI_2).is_err());
        assert!(GaussianState::new(-0.1).is_err());
        assert!(GaussianState::new(0.1).is_ok());
    }

    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn normalized_on_the_walls_interval() {
        for &sigma in &[0.01, 0.05, 0.1, 0.2, 0.3, 0.5] {
            let s = GaussianState::new(sigma).unwrap();
            let norm = simpson(|t| s.density(t), -FRAC_PI_2, FRAC_PI_2, 200_000);
            assert!((norm - 1.0).abs() < 1e-12, "sigma={sigma}: norm={norm}");
            let mean = simpson(|t| t * s.density(t), -FRAC_PI_2, FRAC_PI_2, 200_000);
            assert!(mean.abs() < 1e-15);
        }
    }

    #[test]
    fn nearly_vanishes_at_the_walls() {
        for &sigma in &[0.05, 0.1, 0.2, 0.3] {
            let s = GaussianState::new(sigma).unwrap();
            assert!(s.density(FRAC_PI_2) < 1e-10 * s.density(0.0));
            assert!(s.density(-FRAC_PI_2) < 1e-10 * s.density(0.0));
        }
    }
}
