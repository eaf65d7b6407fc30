use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{tipping_time_numeric, NumericOptions};
use crate::params::{GaussianState, RodParameters};
use crate::semiclassical::InvertedOscillator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Sigma,
    /// `ω = √(g/a)`, varied through `g`.
    Omega,
    Hbar,
}

/// How `σ` follows `ħ` in an ħ sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SigmaScaling {
    #[default]
    Fixed,
    /// `σ = σ₀ √(ħ/ħ₀)` with `ħ₀` the base value.
    SqrtHbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    TipExact,
    TipApprox,
    TipNumeric,
    ValidityRatio,
    UncertaintyProduct,
    DensityProbe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub base: RodParameters,
    pub sigma: f64,
    pub sigma_scaling: SigmaScaling,
    pub outputs: Vec<SweepOutput>,
    /// `(θ, t)` at which [`SweepOutput::DensityProbe`] evaluates `P`.
    pub probe: Option<(f64, f64)>,
    pub numeric: NumericOptions,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>, base: RodParameters, sigma: f64) -> Self {
        Self {
            variable,
            values,
            base,
            sigma,
            sigma_scaling: SigmaScaling::Fixed,
            outputs: vec![
                SweepOutput::TipExact,
                SweepOutput::TipApprox,
                SweepOutput::ValidityRatio,
            ],
            probe: None,
            numeric: NumericOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(Error::InvalidSweep("need at least two sweep values".into()));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidSweep("sweep values must be strictly monotone".into()));
        }
        for &v in &self.values {
            let ok = match self.variable {
                SweepVariable::Sigma => v.is_finite() && v > 0.0 && v < FRAC_PI_2,
                SweepVariable::Omega | SweepVariable::Hbar => v.is_finite() && v > 0.0,
            };
            if !ok {
                return Err(Error::InvalidSweep(format!(
                    "{v} is outside the domain of {:?}",
                    self.variable
                )));
            }
        }
        if self.outputs.contains(&SweepOutput::DensityProbe) && self.probe.is_none() {
            return Err(Error::InvalidSweep(
                "density_probe output needs a probe (theta, t)".into(),
            ));
        }
        if let Some((_, t)) = self.probe {
            if !(t >= 0.0) {
                return Err(Error::InvalidSweep(format!("probe time {t} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Parameters and width at one sweep value.
    pub fn point(&self, value: f64) -> Result<(RodParameters, f64)> {
        Ok(match self.variable {
            SweepVariable::Sigma => (self.base, value),
            SweepVariable::Omega => (self.base.with_omega(value)?, self.sigma),
            SweepVariable::Hbar => {
                let sigma = match self.sigma_scaling {
                    SigmaScaling::Fixed => self.sigma,
                    SigmaScaling::SqrtHbar => self.sigma * (value / self.base.hbar()).sqrt(),
                };
                (self.base.with_hbar(value)?, sigma)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub value: f64,
    pub sigma: f64,
    pub hbar: f64,
    pub omega: f64,
    pub t_tip_exact: Option<f64>,
    pub t_tip_approx: Option<f64>,
    pub t_tip_numeric: Option<f64>,
    pub validity_ratio: Option<f64>,
    pub uncertainty_product: Option<f64>,
    pub density_probe: Option<f64>,
    /// `ln P` at the probe, which stays finite after `P` underflows.
    pub log_density_probe: Option<f64>,
    pub errors: Vec<String>,
}

fn evaluate(spec: &SweepSpec, value: f64) -> SweepRecord {
    let mut rec = SweepRecord {
        value,
        sigma: f64::NAN,
        hbar: f64::NAN,
        omega: f64::NAN,
        t_tip_exact: None,
        t_tip_approx: None,
        t_tip_numeric: None,
        validity_ratio: None,
        uncertainty_product: None,
        density_probe: None,
        log_density_probe: None,
        errors: Vec::new(),
    };
    let (params, sigma) = match spec.point(value) {
        Ok(p) => p,
        Err(e) => {
            rec.errors.push(e.to_string());
            return rec;
        }
    };
    rec.sigma = sigma;
    rec.hbar = params.hbar();
    rec.omega = params.derive().omega;
    let model = InvertedOscillator::new(&params);

    fn keep<T>(errors: &mut Vec<String>, r: Result<T>) -> Option<T> {
        r.map_err(|e| errors.push(e.to_string())).ok()
    }

    let exact = model.tipping_time_exact(sigma);
    for out in &spec.outputs {
        match out {
            SweepOutput::TipExact => rec.t_tip_exact = keep(&mut rec.errors, exact.clone()),
            SweepOutput::TipApprox => {
                rec.t_tip_approx = keep(&mut rec.errors, model.tipping_time_quantum_approx(sigma))
            }
            SweepOutput::ValidityRatio => {
                rec.validity_ratio = keep(&mut rec.errors, exact.clone().map(|t| model.validity(t).ratio))
            }
            SweepOutput::UncertaintyProduct => {
                rec.uncertainty_product = keep(
                    &mut rec.errors,
                    exact.clone().and_then(|t| model.uncertainty_product(sigma, t)),
                )
            }
            SweepOutput::TipNumeric => {
                let r = GaussianState::new(sigma)
                    .and_then(|s| tipping_time_numeric(&s, &params, &spec.numeric))
                    .map(|n| n.t_tip);
                rec.t_tip_numeric = keep(&mut rec.errors, r);
            }
            SweepOutput::DensityProbe => {
                let (theta, t) = spec.probe.expect("validated");
                let r = GaussianState::new(sigma).and_then(|s| {
                    Ok((
                        model.density_analytic(&s, theta, t)?,
                        model.log_density_analytic(&s, theta, t)?,
                    ))
                });
                if let Some((p, lp)) = keep(&mut rec.errors, r) {
                    rec.density_probe = Some(p);
                    rec.log_density_probe = Some(lp);
                }
            }
        }
    }
    rec
}

/// One record per sweep value, in the order of `spec.values`.
///
/// Points are independent and evaluated in parallel; `jobs` caps the number
/// of worker threads (`None` uses rayon's global pool). Failures at a point
/// are recorded in that row's `errors` and do not stop the sweep.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let run = || spec.values.par_iter().map(|&v| evaluate(spec, v)).collect();
    match jobs {
        None => Ok(run()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}
