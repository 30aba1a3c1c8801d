//! `√t μ_t(φ_i)` against its Gaussian limit, with the Kantorovich lower bound on `W₁`.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{Experiment, HorizonRun};
use super::Summary;
use crate::error::{capability, Result};
use crate::predictions::{clt_limits, CltLimit};
use crate::spectral::ModelRegistry;

/// Relative slack allowed in `W₁ ≥ |μ_t(φ_i)|/Lip(φ_i)` for transport round-off.
pub const DUAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltHorizon {
    pub t: f64,
    pub replicas: usize,
    /// `√t·mean|μ_t(φ_i)|`.
    pub scaled_abs_mean: f64,
    pub scaled_abs_stderr: f64,
    /// `t·mean μ_t(φ_i)²`.
    pub scaled_second_moment: f64,
    pub scaled_second_stderr: f64,
    pub w1_mean: f64,
    pub w1_stderr: f64,
    /// `mean|μ_t(φ_i)| / Lip(φ_i)`.
    pub dual_bound_mean: f64,
    /// Replicas with `W₁ < (1 − tol)·|μ_t(φ_i)|/Lip(φ_i)`.
    pub dual_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub model: String,
    pub bernstein: String,
    pub c: f64,
    pub mode: usize,
    pub lipschitz: f64,
    /// `None` for the constant mode.
    pub limit: Option<CltLimit>,
    pub horizons: Vec<CltHorizon>,
    /// `|scaled_abs_mean − limit| ≤ 3·stderr` at the largest horizon.
    pub within_3se: Option<bool>,
}

impl Experiment {
    /// CLT view of replicas already simulated with `clt_mode = cfg.clt_mode`.
    pub fn clt_report(&self, runs: &[HorizonRun]) -> Result<CltReport> {
        let i = self.cfg.clt_mode;
        let modes = self.model.eigen_data(i)?;
        let lip = self.model.lipschitz(&modes[i - 1])?;
        let limit = clt_limits(self.model.as_ref(), &self.bern, i, 1.0)?;
        let mut horizons = Vec::with_capacity(runs.len());
        for (t, reps) in runs {
            let abs: Vec<f64> = reps.iter().map(|r| r.psi[0].abs()).collect();
            let sq: Vec<f64> = reps.iter().map(|r| r.psi[0].powi(2)).collect();
            let w1: Vec<f64> = reps.iter().map(|r| r.w1.unwrap_or(f64::NAN)).collect();
            let (a, s, w) = (Summary::of(&abs), Summary::of(&sq), Summary::of(&w1));
            let bound = |x: f64| x / t.sqrt() / lip;
            let dual_violations = reps
                .iter()
                .filter(|r| r.w1.is_some_and(|w| w < (1.0 - DUAL_TOLERANCE) * bound(r.psi[0].abs())))
                .count();
            horizons.push(CltHorizon {
                t: *t,
                replicas: reps.len(),
                scaled_abs_mean: a.mean,
                scaled_abs_stderr: a.stderr,
                scaled_second_moment: s.mean,
                scaled_second_stderr: s.stderr,
                w1_mean: w.mean,
                w1_stderr: w.stderr,
                dual_bound_mean: bound(a.mean),
                dual_violations,
            });
        }
        let within_3se =
            horizons.last().map(|h| (h.scaled_abs_mean - limit.abs_moment_limit).abs() <= 3.0 * h.scaled_abs_stderr);
        Ok(CltReport {
            model: self.model.id().into(),
            bernstein: self.bern.to_string(),
            c: self.cfg.params.c,
            mode: i,
            lipschitz: lip,
            limit: Some(limit),
            horizons,
            within_3se,
        })
    }
}

/// CLT experiment for mode `i`; `i = 0` is the constant eigenfunction, whose
/// centred integral vanishes for every path.
pub fn clt_experiment(cfg: &ExperimentConfig, i: usize) -> Result<CltReport> {
    if i == 0 {
        let model = ModelRegistry::default().build(&cfg.model, &cfg.params)?;
        let zero = |t: &f64| CltHorizon {
            t: *t,
            replicas: cfg.replicas,
            scaled_abs_mean: 0.0,
            scaled_abs_stderr: 0.0,
            scaled_second_moment: 0.0,
            scaled_second_stderr: 0.0,
            w1_mean: f64::NAN,
            w1_stderr: f64::NAN,
            dual_bound_mean: 0.0,
            dual_violations: 0,
        };
        return Ok(CltReport {
            model: model.id().into(),
            bernstein: cfg.bernstein()?.to_string(),
            c: cfg.params.c,
            mode: 0,
            lipschitz: 0.0,
            limit: None,
            horizons: cfg.horizons.iter().map(zero).collect(),
            within_3se: None,
        });
    }
    let mut cfg = cfg.clone();
    cfg.clt_mode = i;
    let exp = Experiment::new(&cfg, &ModelRegistry::default())?;
    if exp.model.ot_geometry() == crate::spectral::OtGeometry::Torus {
        return Err(capability("the W₁ lower bound needs an exact transport solver"));
    }
    let (_, runs) = exp.run_with_replicas()?;
    exp.clt_report(&runs)
}
