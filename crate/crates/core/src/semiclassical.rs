//! Inverted-oscillator semiclassics for the rod near the vertical.
//!
//! Near `θ = 0` the potential is replaced by `m g a (1 − θ²/2)`, which turns
//! the rod into a harmonic oscillator of "mass" `M a² = I` continued to
//! imaginary frequency `Ω`. For short times the path integral is dominated by
//! the single direct classical path, which gives the closed-form propagator
//! implemented here. Acting with it on the initial Gaussian yields a Gaussian
//! whose width grows as
//!
//! ```text
//! s(t)² = σ² cosh²(Ωt) + (ħ / IΩσ)² sinh²(Ωt)
//! ```
//!
//! and the density `P(θ, t) = exp(−θ²/s²) / (√π s)`. The tipping time is when
//! the density maximum, followed along `t`, reaches `θ = σ`.
//!
//! Everything is expressed through `I = M a²`, `Ω` and `ħ`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{AngularGrid, WaveFunction};
use crate::optimize::{argmax, bisect_sign, golden_section_max, log_space};
use crate::params::{DerivedParameters, GaussianState, Regime, RodParameters};

/// Ratio below which the propagator is treated as valid.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;
/// Ratio at or above which the propagator is refused outright.
pub const DEFAULT_VALIDITY_HARD_LIMIT: f64 = 1.0;
/// Largest `IΩσ²/ħ` for which the linearized tipping time is trusted.
pub const DEFAULT_LINEARIZED_LIMIT: f64 = 0.3;

const PEAK_SCAN_POINTS: usize = 256;
const PEAK_REL_TOL: f64 = 1e-10;

const I_UNIT: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityPolicy {
    pub threshold: f64,
    pub hard_limit: f64,
}

impl Default for ValidityPolicy {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_VALIDITY_THRESHOLD,
            hard_limit: DEFAULT_VALIDITY_HARD_LIMIT,
        }
    }
}

/// How far `t` is from the short-time regime where the direct-path
/// propagator is trustworthy: `ratio = 2ħ sinh(Ωt) / (IΩ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatorValidity {
    pub time: f64,
    pub ratio: f64,
    pub is_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TippingReport {
    pub sigma: f64,
    pub t_tip_exact: f64,
    pub t_tip_quantum_approx: f64,
    pub t_tip_linearized: f64,
    pub validity: PropagatorValidity,
    pub regime: Regime,
    pub de_broglie_ratio: f64,
    /// `IΩσ²/ħ`, the argument of the inverse sinh in the quantum approximation.
    pub linearization_argument: f64,
    /// `Iσ²/t_tip_exact` divided by ħ.
    pub uncertainty_ratio: f64,
    pub warnings: Vec<String>,
}

/// The semiclassical model of one rod.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertedOscillator {
    derived: DerivedParameters,
    policy: ValidityPolicy,
}

impl InvertedOscillator {
    pub fn new(params: &RodParameters) -> Self {
        Self {
            derived: params.derive(),
            policy: ValidityPolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: ValidityPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn derived(&self) -> &DerivedParameters {
        &self.derived
    }

    pub fn policy(&self) -> ValidityPolicy {
        self.policy
    }

    /// `M a² = I`.
    pub fn inertia(&self) -> f64 {
        self.derived.moment_of_inertia
    }

    /// `Ω`.
    pub fn growth_rate(&self) -> f64 {
        self.derived.growth_rate
    }

    pub fn hbar(&self) -> f64 {
        self.derived.hbar()
    }

    pub fn validity(&self, t: f64) -> PropagatorValidity {
        let omega = self.growth_rate();
        let ratio = 2.0 * self.hbar() * (omega * t).sinh() / (self.inertia() * omega);
        PropagatorValidity {
            time: t,
            ratio,
            is_valid: ratio < self.policy.threshold,
        }
    }

    /// Time at which the validity ratio reaches `ratio`.
    pub fn time_at_ratio(&self, ratio: f64) -> f64 {
        let omega = self.growth_rate();
        (ratio * self.inertia() * omega / (2.0 * self.hbar())).asinh() / omega
    }

    /// End of the window in which the propagator counts as valid.
    pub fn validity_window(&self) -> f64 {
        self.time_at_ratio(self.policy.threshold)
    }

    // pointwise evaluations stay quiet; whole-state operations warn once
    fn checked_validity(&self, t: f64) -> Result<PropagatorValidity> {
        let v = self.validity(t);
        if v.ratio >= self.policy.hard_limit || v.ratio.is_nan() {
            return Err(Error::ValidityExceeded {
                time: t,
                ratio: v.ratio,
                limit: self.policy.hard_limit,
            });
        }
        Ok(v)
    }

    /// Logs a warning when `t` is past the validity threshold.
    pub fn warn_if_approximate(&self, t: f64) {
        let v = self.validity(t);
        if !v.is_valid {
            log::warn!(
                "validity ratio {} at t = {t} exceeds {}; the direct-path propagator is approximate",
                v.ratio,
                self.policy.threshold
            );
        }
    }

    /// `α = IΩ / (2ħ sinh Ωt)`.
    pub fn alpha(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::DegenerateTime("alpha"));
        }
        let omega = self.growth_rate();
        Ok(self.inertia() * omega / (2.0 * self.hbar() * (omega * t).sinh()))
    }

    /// Classical path from `(θ1, 0)` to `(θ2, t)`, evaluated at `τ`.
    pub fn classical_trajectory(&self, theta1: f64, theta2: f64, t: f64, tau: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::DegenerateTime("classical_trajectory"));
        }
        if !(0.0..=t).contains(&tau) {
            return Err(Error::InvalidInput(format!("tau = {tau} outside [0, {t}]")));
        }
        let omega = self.growth_rate();
        let c1 = (theta2 - theta1 * (omega * t).cosh()) / (omega * t).sinh();
        Ok(c1 * (omega * tau).sinh() + theta1 * (omega * tau).cosh())
    }

    /// `L = ½ I θ̇² + ½ I Ω² θ²` (constant `m g a` dropped).
    pub fn lagrangian(&self, theta: f64, theta_dot: f64) -> f64 {
        let omega = self.growth_rate();
        0.5 * self.inertia() * (theta_dot * theta_dot + omega * omega * theta * theta)
    }

    /// Action along the classical path:
    /// `IΩ / (2 sinh Ωt) · [(θ1² + θ2²) cosh Ωt − 2θ1θ2]`.
    pub fn classical_action(&self, theta1: f64, theta2: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::DegenerateTime("classical_action"));
        }
        let omega = self.growth_rate();
        let (s, c) = ((omega * t).sinh(), (omega * t).cosh());
        Ok(self.inertia() * omega / (2.0 * s) * ((theta1 * theta1 + theta2 * theta2) * c - 2.0 * theta1 * theta2))
    }

    /// `G(0, t; 0, 0) = √(IΩ / (2πiħ sinh Ωt)) = √(α / (πi))`, principal branch,
    /// so the phase is the constant `e^{−iπ/4}`.
    pub fn propagator_prefactor(&self, t: f64) -> Result<Complex64> {
        if !(t > 0.0) {
            return Err(Error::DegenerateTime("propagator"));
        }
        self.checked_validity(t)?;
        let alpha = self.alpha(t)?;
        Ok((Complex64::new(alpha / PI, 0.0) / I_UNIT).sqrt())
    }

    /// Direct-path propagator `G(θ2, t; θ1, 0)`.
    pub fn propagator(&self, theta1: f64, theta2: f64, t: f64) -> Result<Complex64> {
        let pre = self.propagator_prefactor(t)?;
        let phase = self.classical_action(theta1, theta2, t)? / self.hbar();
        Ok(pre * Complex64::from_polar(1.0, phase))
    }

    /// Overlap `∫ G*(θ, t; θ′, 0) G(θ′, t; 0, 0) dθ′` in the closed form
    /// `|G(0,t;0,0)|² exp(−iαθ² cosh Ωt) sin(απθ/2) / (αθ)`.
    ///
    /// Note: multiplying the two kernels gives `exp(2iαθθ′)` inside the
    /// integral, which would integrate to `sin(απθ)/(αθ)`. The expression
    /// here keeps the half-argument form; both collapse to `|G|²π/α · δ(θ)`
    /// as `α → ∞`. The `θ → 0` value is the sinc limit `|G|² π/2`.
    pub fn unitarity_kernel(&self, theta: f64, t: f64) -> Result<Complex64> {
        let alpha = self.alpha(t)?;
        let g2 = alpha / PI;
        let c = (self.growth_rate() * t).cosh();
        let x = alpha * PI * theta / 2.0;
        // sin(x)/(αθ) = (π/2)·sin(x)/x
        let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        Ok(Complex64::from_polar(g2 * FRAC_PI_2 * sinc, -alpha * theta * theta * c))
    }

    /// `∫ G(θ, t; θ′, 0) f(θ′) dθ′` over `[−π/2, π/2]` by quadrature.
    ///
    /// The kernel is a chirp `exp(iA(θ′ − θ/cosh Ωt)²)` with `A = α cosh Ωt`,
    /// which for small `t` oscillates far too fast to integrate over the whole
    /// interval. The integrand is multiplied by a C∞ window around the
    /// stationary point: `1` within 20 kernel widths `1/√A`, falling to `0` at
    /// 40. Outside the stationary point the integrand has no stationary phase,
    /// so the windowed-off part is beyond double precision for smooth `f`.
    /// Composite Simpson with ~12 nodes per local oscillation does the rest.
    pub fn propagate_by_quadrature<F>(&self, f: F, theta: f64, t: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let pre = self.propagator_prefactor(t)?;
        let alpha = self.alpha(t)?;
        let c = (self.growth_rate() * t).cosh();
        let a = alpha * c;
        let center = theta / c;
        let width = a.sqrt().recip();
        let (inner, outer) = (20.0 * width, 40.0 * width);

        let lo = (center - outer).max(-FRAC_PI_2);
        let hi = (center + outer).min(FRAC_PI_2);
        if lo >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let max_rate = 2.0 * a * outer.min(PI) + 1.0;
        let h_target = 2.0 * PI / (12.0 * max_rate);
        let mut n = ((hi - lo) / h_target).ceil() as usize;
        n = n.max(64);
        n += n % 2;
        let h = (hi - lo) / n as f64;

        let window = |u: f64| -> f64 {
            let u = u.abs();
            if u <= inner {
                1.0
            } else if u >= outer {
                0.0
            } else {
                1.0 - smooth_step((u - inner) / (outer - inner))
            }
        };
        // S/ħ = α[(θ² + θ′²)c − 2θθ′]
        let integrand = |tp: f64| -> Complex64 {
            let w = window(tp - center);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let phase = alpha * ((theta * theta + tp * tp) * c - 2.0 * theta * tp);
            f(tp) * Complex64::from_polar(w, phase)
        };
        let mut sum = integrand(lo) + integrand(hi);
        for k in 1..n {
            let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += integrand(lo + k as f64 * h) * weight;
        }
        Ok(pre * sum * (h / 3.0))
    }

    /// Closed-form `ψ(θ, t)` for the Gaussian initial state, with the
    /// initial state extended to the whole line (`Erf(π/2σ) ≈ 1`).
    pub fn amplitude_analytic(&self, state: &GaussianState, theta: f64, t: f64) -> Result<Complex64> {
        let sigma = state.sigma();
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            let norm = (PI.sqrt() * sigma).sqrt().recip();
            return Ok(Complex64::new(
                norm * (-theta * theta / (2.0 * sigma * sigma)).exp(),
                0.0,
            ));
        }
        let g0 = self.propagator_prefactor(t)?;
        let alpha = self.alpha(t)?;
        let c = (self.growth_rate() * t).cosh();
        let s2 = sigma * sigma;

        let pre = g0 * PI.sqrt() / (PI.sqrt() * sigma).sqrt();
        let q = Complex64::new(1.0 / (2.0 * s2), -alpha * c);
        let chirp = Complex64::from_polar(1.0, alpha * theta * theta * c);
        let envelope = (Complex64::new(4.0 * alpha * alpha * theta * theta, 0.0)
            / Complex64::new(-2.0 / s2, 4.0 * alpha * c))
        .exp();
        Ok(pre * chirp * envelope / q.sqrt())
    }

    /// Closed-form evolved state sampled on `grid`.
    pub fn evolve_analytic(&self, state: &GaussianState, t: f64, grid: &AngularGrid) -> Result<WaveFunction> {
        self.warn_if_approximate(t);
        let amplitudes = grid
            .nodes()
            .iter()
            .map(|&theta| self.amplitude_analytic(state, theta, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(WaveFunction::new(grid.clone(), amplitudes, t))
    }

    /// `(D, E)` with `P = IΩσ / (√π √D) · exp(−E/D)`.
    fn density_parts(&self, sigma: f64, theta: f64, t: f64) -> (f64, f64) {
        let omega = self.growth_rate();
        let i_omega = self.inertia() * omega;
        let hbar = self.hbar();
        let (s, c) = ((omega * t).sinh(), (omega * t).cosh());
        let s2 = sigma * sigma;
        let d = i_omega * i_omega * s2 * s2 * c * c + hbar * hbar * s * s;
        let e = i_omega * i_omega * s2 * theta * theta;
        (d, e)
    }

    /// `P(θ, t)` in closed form.
    pub fn density_analytic(&self, state: &GaussianState, theta: f64, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let sigma = state.sigma();
        let (d, e) = self.density_parts(sigma, theta, t);
        let i_omega = self.inertia() * self.growth_rate();
        Ok(i_omega * sigma / (PI.sqrt() * d.sqrt()) * (-e / d).exp())
    }

    /// `ln P(θ, t)`, finite where `P` itself underflows.
    pub fn log_density_analytic(&self, state: &GaussianState, theta: f64, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let sigma = state.sigma();
        let (d, e) = self.density_parts(sigma, theta, t);
        let i_omega = self.inertia() * self.growth_rate();
        Ok((i_omega * sigma / PI.sqrt()).ln() - 0.5 * d.ln() - e / d)
    }

    /// `∂P/∂t` from differentiating the closed form.
    pub fn density_time_derivative(&self, state: &GaussianState, theta: f64, t: f64) -> Result<f64> {
        let p = self.density_analytic(state, theta, t)?;
        let sigma = state.sigma();
        let omega = self.growth_rate();
        let i_omega = self.inertia() * omega;
        let hbar = self.hbar();
        let s2 = sigma * sigma;
        let (d, e) = self.density_parts(sigma, theta, t);
        let d_dot = omega * (2.0 * omega * t).sinh() * (i_omega * i_omega * s2 * s2 + hbar * hbar);
        Ok(p * d_dot * (e / (d * d) - 0.5 / d))
    }

    /// Time at which `P(θ, ·)` peaks.
    ///
    /// Coarse log-spaced scan over `[10⁻⁶/Ω, t(ratio = hard limit)]`, then
    /// golden-section refinement of the bracket around the best sample, then
    /// bisection on the sign of `∂P/∂t` inside the refined bracket. The last
    /// stage resolves the stationary point to machine precision, which a
    /// value-based search cannot do near a flat maximum.
    ///
    /// The width `s(t)` grows monotonically and `P` at fixed `θ` peaks where
    /// `s² = 2θ²`, so there is no interior maximum for `|θ| ≤ σ/√2`.
    pub fn density_peak_time(&self, state: &GaussianState, theta: f64) -> Result<f64> {
        let sigma = state.sigma();
        let threshold = sigma / 2f64.sqrt();
        if theta.abs() <= threshold {
            return Err(Error::NoPeak { theta, threshold });
        }
        let omega = self.growth_rate();
        let t_lo = 1e-6 / omega;
        let t_hi = self.time_at_ratio(self.policy.hard_limit);
        if t_hi <= t_lo {
            return Err(Error::ValidityExceeded {
                time: t_lo,
                ratio: self.validity(t_lo).ratio,
                limit: self.policy.hard_limit,
            });
        }
        let log_p = |t: f64| self.log_density_analytic(state, theta, t).unwrap_or(f64::NEG_INFINITY);

        let times = log_space(t_lo, t_hi, PEAK_SCAN_POINTS);
        let values: Vec<f64> = times.iter().map(|&t| log_p(t)).collect();
        let k = argmax(&values).expect("non-empty scan");
        if k == times.len() - 1 {
            return Err(Error::ValidityExceeded {
                time: t_hi,
                ratio: self.validity(t_hi).ratio,
                limit: self.policy.hard_limit,
            });
        }
        let lo = if k == 0 { 0.0 } else { times[k - 1] };
        let hi = times[k + 1];
        let (glo, ghi) = golden_section_max(log_p, lo, hi, PEAK_REL_TOL);

        let slope = |t: f64| self.density_time_derivative(state, theta, t).unwrap_or(0.0);
        // widen the golden bracket back out until the slope changes sign
        // across it; it is only good to about √ε
        let mut a = glo;
        let mut b = ghi;
        let pad = (ghi - glo).max(1e-7 * ghi);
        let mut steps = 0;
        while !(slope(a) > 0.0 && slope(b) <= 0.0) && steps < 60 {
            a = (a - pad * 2f64.powi(steps)).max(lo);
            b = (b + pad * 2f64.powi(steps)).min(hi);
            steps += 1;
        }
        if slope(a) > 0.0 && slope(b) <= 0.0 {
            Ok(bisect_sign(slope, a, b))
        } else {
            Ok(0.5 * (glo + ghi))
        }
    }

    fn check_sigma(sigma: f64) -> Result<f64> {
        if sigma.is_finite() && sigma > 0.0 && sigma < FRAC_PI_2 {
            Ok(sigma)
        } else {
            Err(Error::SigmaOutOfRange(sigma))
        }
    }

    /// `(1/Ω) asinh(IΩσ² / √(ħ² + I²Ω²σ⁴))`.
    pub fn tipping_time_exact(&self, sigma: f64) -> Result<f64> {
        let sigma = Self::check_sigma(sigma)?;
        let omega = self.growth_rate();
        let x = self.inertia() * omega * sigma * sigma;
        Ok((x / self.hbar().hypot(x)).asinh() / omega)
    }

    /// The same time written in `m`, `a`, `ω` and `κ`:
    /// `(√κ/ω) asinh(√κ m a² ω σ² / √(ħ² + κ m² a⁴ ω² σ⁴))`.
    pub fn tipping_time_exact_rod_variables(&self, sigma: f64) -> Result<f64> {
        let sigma = Self::check_sigma(sigma)?;
        let d = &self.derived;
        let p = &d.params;
        let ma2 = p.mass() * p.half_length() * p.half_length();
        let sk = d.kappa.sqrt();
        let num = sk * ma2 * d.omega * sigma * sigma;
        let den = (self.hbar().powi(2) + d.kappa * (ma2 * d.omega * sigma * sigma).powi(2)).sqrt();
        Ok(sk / d.omega * (num / den).asinh())
    }

    /// `IΩσ²/ħ`.
    pub fn linearization_argument(&self, sigma: f64) -> f64 {
        self.inertia() * self.growth_rate() * sigma * sigma / self.hbar()
    }

    /// Tipping time with the `σ⁴` term under the root dropped:
    /// `(√κ/ω) asinh(√κ m a² ω σ²/ħ) = (1/Ω) asinh(IΩσ²/ħ)`.
    pub fn tipping_time_quantum_approx(&self, sigma: f64) -> Result<f64> {
        let sigma = Self::check_sigma(sigma)?;
        if self.derived.regime() != Regime::Quantum {
            log::warn!(
                "quantum approximation used outside the quantum regime (lambda_dB/a = {})",
                self.derived.de_broglie_ratio
            );
        }
        let d = &self.derived;
        Ok(d.kappa.sqrt() / d.omega * self.linearization_argument(sigma).asinh())
    }

    /// `Iσ²/ħ`.
    pub fn tipping_time_linearized(&self, sigma: f64) -> Result<f64> {
        let sigma = Self::check_sigma(sigma)?;
        Ok(self.inertia() * sigma * sigma / self.hbar())
    }

    /// `Δθ · Δl` with `Δθ = σ` and `Δl = Iσ / t_tip`.
    pub fn uncertainty_product(&self, sigma: f64, tip_time: f64) -> Result<f64> {
        let sigma = Self::check_sigma(sigma)?;
        if !(tip_time > 0.0) {
            return Err(Error::DegenerateTime("uncertainty_product"));
        }
        let arg = self.linearization_argument(sigma);
        if arg > DEFAULT_LINEARIZED_LIMIT {
            log::warn!(
                "uncertainty product outside the linearized regime (argument {arg} > {DEFAULT_LINEARIZED_LIMIT})"
            );
        }
        Ok(sigma * self.inertia() * sigma / tip_time)
    }

    pub fn tipping_report(&self, sigma: f64) -> Result<TippingReport> {
        let t_exact = self.tipping_time_exact(sigma)?;
        let d = &self.derived;
        let regime = d.regime();
        let arg = self.linearization_argument(sigma);
        let mut warnings = Vec::new();
        if sigma > crate::params::SIGMA_WARN_THRESHOLD {
            warnings.push(format!(
                "sigma = {sigma} > {}: initial state is not well localized",
                crate::params::SIGMA_WARN_THRESHOLD
            ));
        }
        if regime != Regime::Quantum {
            warnings.push(format!(
                "regime is {regime:?} (lambda_dB/a = {}); the sigma^4 term dropped by the quantum approximation is not negligible",
                d.de_broglie_ratio
            ));
        }
        let validity = self.validity(t_exact);
        if !validity.is_valid {
            warnings.push(format!(
                "validity ratio {} at the tipping time exceeds {}",
                validity.ratio, self.policy.threshold
            ));
        }
        Ok(TippingReport {
            sigma,
            t_tip_exact: t_exact,
            t_tip_quantum_approx: d.kappa.sqrt() / d.omega * arg.asinh(),
            t_tip_linearized: self.tipping_time_linearized(sigma)?,
            validity,
            regime,
            de_broglie_ratio: d.de_broglie_ratio,
            linearization_argument: arg,
            uncertainty_ratio: self.inertia() * sigma * sigma / (t_exact * self.hbar()),
            warnings,
        })
    }
}

/// C∞ step from 0 at `x ≤ 0` to 1 at `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    fn bump(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    let (a, b) = (bump(x), bump(1.0 - x));
    a / (a + b)
}
