//! Monte-Carlo experiments, rate fits, validation suites and report files.

mod clt;
mod config;
mod experiment;
mod fit;
mod output;
mod validate;

use serde::Serialize;

pub use clt::{clt_experiment, CltHorizon, CltReport, DUAL_TOLERANCE};
pub use config::{default_delta, load_configs, parse_configs, ExperimentConfig};
pub use experiment::{
    abs_mu_stat, abs_psi_stat, psi_stat, run_experiment, sample_measure, DeltaCheck, Experiment, HorizonReport,
    HorizonRun, LimitCheck, RateReport, ReplicaStats, StatSummary, LEDOUX_CELLS, LEDOUX_SLACK, TORUS_SINKHORN_TOL,
};
pub use fit::{fit_rate, CandidateFit, Law, RateFit, BIC_MARGIN};
pub use output::{predict, write_predictions_csv, write_results_csv, PredictionRow, ResultRow};
pub use validate::{
    assignment_by_enumeration, laplace_deviation, ledoux_suite, validate, Check, ValidationLedger, LAPLACE_ALPHAS,
    LAPLACE_DRAWS, LAPLACE_RS, SUITES,
};

/// Mean and standard error, summed in index order so results do not depend
/// on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Infinite for a single value.
    pub stderr: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::INFINITY, n };
        }
        let mean = pairwise_sum(values) / n as f64;
        if n == 1 {
            return Self { mean, stderr: f64::INFINITY, n };
        }
        let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        Self { mean, stderr: (var / n as f64).sqrt(), n }
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
