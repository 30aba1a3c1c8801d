//! Wasserstein distances between empirical measures and `μ`.
//!
//! One-dimensional models go through the monotone (quantile) coupling, the
//! circle through its cut formulation, small discrete instances through an
//! exact network simplex, and the flat torus through debiased Sinkhorn.

mod circle;
mod interval;
mod network_simplex;
mod sinkhorn;

use std::sync::Arc;

use serde::Serialize;

pub use circle::{wp_circle, wp_circle_scan};
pub use interval::{target_for, wp_interval, DiscreteTarget, ModelTarget, TargetLaw, UniformTarget};
pub use network_simplex::{w2_discrete_exact, Coupling, TransportSolution};
pub use sinkhorn::{bin_torus, sinkhorn_grid_torus, SinkhornOptions};

use crate::empirical::EmpiricalMeasure;
use crate::error::{capability, input, Result};
use crate::spectral::{OtGeometry, SpectralModel};

/// A Wasserstein distance with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OTResult {
    /// Order `p ≥ 1`.
    pub p: f64,
    /// `W_p`.
    pub value: f64,
    /// `W_p^p`.
    pub cost: f64,
    pub method: &'static str,
    /// Certified bound on `|value − W_p|`.
    pub bound: f64,
}

impl OTResult {
    pub(crate) fn from_cost(p: f64, cost: f64, cost_bound: f64, method: &'static str) -> Self {
        let cost = cost.max(0.0);
        let value = cost.powf(1.0 / p);
        let bound = ((cost + cost_bound).powf(1.0 / p) - value).max(value - (cost - cost_bound).max(0.0).powf(1.0 / p));
        Self { p, value, cost, method, bound: bound.max(0.0) }
    }
}

pub(crate) fn check_order(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(input(format!("transport order p={p} must be a finite number ≥ 1")));
    }
    Ok(())
}

/// Exact transport to `μ` for one model, with any target tables built once.
pub enum InvariantOt {
    Circle,
    Interval(Box<dyn TargetLaw>),
}

impl InvariantOt {
    pub fn new(model: Arc<dyn SpectralModel>) -> Result<Self> {
        match model.ot_geometry() {
            OtGeometry::Circle => Ok(Self::Circle),
            OtGeometry::Interval => Ok(Self::Interval(target_for(model)?)),
            OtGeometry::Torus => Err(capability(format!(
                "{}: only the entropic grid solver is available; use sinkhorn_grid_torus",
                model.id()
            ))),
            OtGeometry::Unsupported => Err(capability(format!("{}: no transport support", model.id()))),
        }
    }

    /// `W_p(emp, μ)`.
    pub fn wp(&self, emp: &EmpiricalMeasure, p: f64) -> Result<OTResult> {
        match self {
            Self::Circle => wp_circle(emp, p),
            Self::Interval(t) => wp_interval(emp, t.as_ref(), p),
        }
    }
}

impl std::fmt::Debug for InvariantOt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Circle => write!(f, "InvariantOt::Circle"),
            Self::Interval(_) => write!(f, "InvariantOt::Interval"),
        }
    }
}

/// `W_p(emp, μ)` for a simulable model, dispatching on its geometry.
pub fn wasserstein_to_invariant(emp: &EmpiricalMeasure, model: Arc<dyn SpectralModel>, p: f64) -> Result<OTResult> {
    InvariantOt::new(model)?.wp(emp, p)
}

/// Whether [`wasserstein_to_invariant`] is exact for this model.
pub fn exact_ot_available(model: &dyn SpectralModel) -> bool {
    matches!(model.ot_geometry(), OtGeometry::Circle | OtGeometry::Interval)
}

/// `∫ s|s|^{p}/(p+1)`, the antiderivative of `|s|^p`.
pub(crate) fn abs_pow_antiderivative(s: f64, p: f64) -> f64 {
    if p == 2.0 {
        s * s * s / 3.0
    } else if p == 1.0 {
        s * s.abs() / 2.0
    } else {
        s * s.abs().powf(p) / (p + 1.0)
    }
}

/// Sort `(position, weight)` pairs and return positions with cumulative weights.
pub(crate) fn sorted_steps(mut atoms: Vec<(f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut cum = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    for a in &atoms {
        acc += a.1 / total;
        cum.push(acc);
    }
    if let Some(last) = cum.last_mut() {
        *last = 1.0;
    }
    (atoms.into_iter().map(|a| a.0).collect(), cum)
}
