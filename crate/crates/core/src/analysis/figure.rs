use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::argmax;
use crate::params::GaussianState;
use crate::semiclassical::InvertedOscillator;

/// `P(θ, t)` against `t` at one fixed `θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub theta: f64,
    pub values: Vec<f64>,
    /// Lattice index of the largest sample.
    pub peak_index: usize,
    /// Peak time refined off-lattice; `None` where `P` only decays.
    pub peak_time: Option<f64>,
    /// Sign changes of the discrete time derivative.
    pub derivative_sign_changes: usize,
    pub strictly_decreasing: bool,
    /// Rises, then falls, with exactly one sign change.
    pub unimodal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySurface {
    pub sigma: f64,
    pub thetas: Vec<f64>,
    pub times: Vec<f64>,
    pub curves: Vec<DensityCurve>,
    /// Peak times of the `θ ≠ 0` curves strictly increase with `|θ|`.
    pub peaks_ordered: bool,
}

impl DensitySurface {
    pub fn curve(&self, theta: f64) -> Option<&DensityCurve> {
        self.curves.iter().find(|c| c.theta == theta)
    }

    /// `θ = 0` curves decrease and every other curve is unimodal.
    pub fn has_expected_shape(&self) -> bool {
        self.peaks_ordered
            && self.curves.iter().all(|c| {
                if c.theta == 0.0 {
                    c.strictly_decreasing
                } else {
                    c.unimodal
                }
            })
    }
}

fn sign_changes(values: &[f64]) -> usize {
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

/// Density-versus-time curves for a set of angles on a common time lattice,
/// annotated with their shape.
pub fn figure1_curves(
    model: &InvertedOscillator,
    state: &GaussianState,
    thetas: &[f64],
    times: &[f64],
) -> Result<DensitySurface> {
    if thetas.is_empty() {
        return Err(Error::InvalidInput("need at least one theta".into()));
    }
    if times.len() < 3 || !times.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidInput(
            "time lattice must be strictly increasing with at least 3 points".into(),
        ));
    }
    if let Some(&t_last) = times.last() {
        model.warn_if_approximate(t_last);
    }
    let mut curves = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let values = times
            .iter()
            .map(|&t| model.density_analytic(state, theta, t))
            .collect::<Result<Vec<_>>>()?;
        let peak_index = argmax(&values).unwrap_or(0);
        let changes = sign_changes(&values);
        let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
        let unimodal = changes == 1 && peak_index > 0 && peak_index + 1 < values.len();
        let peak_time = if theta != 0.0 && unimodal {
            model.density_peak_time(state, theta).ok()
        } else {
            None
        };
        curves.push(DensityCurve {
            theta,
            values,
            peak_index,
            peak_time,
            derivative_sign_changes: changes,
            strictly_decreasing,
            unimodal,
        });
    }

    let mut peaked: Vec<(f64, Option<f64>)> = curves
        .iter()
        .filter(|c| c.theta != 0.0)
        .map(|c| (c.theta.abs(), c.peak_time))
        .collect();
    peaked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let peaks_ordered =
        peaked.iter().all(|p| p.1.is_some()) && peaked.windows(2).all(|w| w[1].0 == w[0].0 || w[1].1 > w[0].1);

    Ok(DensitySurface {
        sigma: state.sigma(),
        thetas: thetas.to_vec(),
        times: times.to_vec(),
        curves,
        peaks_ordered,
    })
}
