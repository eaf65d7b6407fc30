//! Uniform discretization of the angular domain between the walls and
//! wavefunctions sampled on it.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_GRID_POINTS: usize = 64;

/// Interior nodes of `[-π/2, π/2]`; the walls themselves carry the implicit
/// Dirichlet zeros and are not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularGrid {
    n_points: usize,
    spacing: f64,
    #[serde(skip)]
    nodes: Vec<f64>,
}

impl AngularGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < MIN_GRID_POINTS {
            return Err(Error::GridTooSmall {
                got: n_points,
                min: MIN_GRID_POINTS,
            });
        }
        let spacing = PI / (n_points + 1) as f64;
        // (2(j+1) - (n+1)) is an exact integer, so the nodes are exactly
        // antisymmetric about 0
        let nodes = (0..n_points)
            .map(|j| (2 * (j + 1)) as f64 - (n_points + 1) as f64)
            .map(|k| 0.5 * k * spacing)
            .collect();
        Ok(Self {
            n_points,
            spacing,
            nodes,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of nodes with `|θ| ≤ half_width`.
    pub fn count_within(&self, half_width: f64) -> usize {
        self.nodes.iter().filter(|t| t.abs() <= half_width).count()
    }

    /// Bracketing node index `j` and fractional position `s ∈ [0, 1)` such
    /// that `θ = θ_j + s Δθ`, with `j = -1` / `j = n - 1` meaning the left /
    /// right wall segment.
    fn locate(&self, theta: f64) -> Option<(isize, f64)> {
        if theta.abs() > FRAC_PI_2 {
            return None;
        }
        let x = (theta + FRAC_PI_2) / self.spacing - 1.0;
        let j = x.floor().clamp(-1.0, self.n_points as f64 - 1.0);
        Some((j as isize, x - j))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: AngularGrid,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl WaveFunction {
    pub fn new(grid: AngularGrid, amplitudes: Vec<Complex64>, time: f64) -> Self {
        assert_eq!(grid.n_points(), amplitudes.len());
        Self { grid, amplitudes, time }
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Trapezoidal `∫|ψ|²dθ`; the wall values are zero.
    pub fn norm(&self) -> f64 {
        self.grid.spacing() * self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let scale = self.norm().sqrt().recip();
        for z in &mut self.amplitudes {
            *z *= scale;
        }
    }

    /// `∫ f(θ) |ψ|² dθ` by the trapezoidal rule.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid.spacing()
            * self
                .grid
                .nodes()
                .iter()
                .zip(&self.amplitudes)
                .map(|(&t, z)| f(t) * z.norm_sqr())
                .sum::<f64>()
    }

    pub fn mean_theta(&self) -> f64 {
        self.expectation(|t| t)
    }

    /// `max_j |ψ(θ_j) - ψ(-θ_j)|`.
    pub fn parity_defect(&self) -> f64 {
        let n = self.amplitudes.len();
        (0..n / 2)
            .map(|j| (self.amplitudes[j] - self.amplitudes[n - 1 - j]).norm())
            .fold(0.0, f64::max)
    }

    fn value_at(&self, j: isize) -> Complex64 {
        if j < 0 || j as usize >= self.amplitudes.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[j as usize]
        }
    }

    /// `|ψ|²` linearly interpolated between the bracketing nodes (walls count
    /// as zero). Zero outside the walls.
    pub fn density_at(&self, theta: f64) -> f64 {
        match self.grid.locate(theta) {
            None => 0.0,
            Some((j, s)) => (1.0 - s) * self.value_at(j).norm_sqr() + s * self.value_at(j + 1).norm_sqr(),
        }
    }

    /// Cubic (Catmull-Rom) interpolation of the complex amplitude.
    pub fn amplitude_at(&self, theta: f64) -> Complex64 {
        match self.grid.locate(theta) {
            None => Complex64::new(0.0, 0.0),
            Some((j, s)) => {
                let p0 = self.value_at(j - 1);
                let p1 = self.value_at(j);
                let p2 = self.value_at(j + 1);
                let p3 = self.value_at(j + 2);
                let s2 = s * s;
                let s3 = s2 * s;
                (p1 * 2.0
                    + (p2 - p0) * s
                    + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * s2
                    + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * s3)
                    * 0.5
            }
        }
    }
}
