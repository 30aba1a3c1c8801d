//! CSV tables for `predict` and `experiment`.

use std::io::Write;

use serde::Serialize;

use super::clt::CltReport;
use super::config::ExperimentConfig;
use super::experiment::RateReport;
use crate::error::{Error, Result};
use crate::predictions::{eta, regime_for_model};
use crate::spectral::ModelRegistry;

/// One `results.csv` line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub model: String,
    pub bernstein: String,
    pub c: f64,
    pub t: f64,
    pub replicas: usize,
    pub stat: String,
    pub mean: f64,
    pub stderr: f64,
}

impl RateReport {
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for h in &self.horizons {
            for s in &h.stats {
                rows.push(ResultRow {
                    model: self.model.clone(),
                    bernstein: self.bernstein.clone(),
                    c: self.c,
                    t: h.t,
                    replicas: h.replicas,
                    stat: s.stat.clone(),
                    mean: s.mean,
                    stderr: s.stderr,
                });
            }
        }
        rows
    }
}

impl CltReport {
    pub fn rows(&self) -> Vec<ResultRow> {
        let row = |t: f64, replicas: usize, stat: &str, mean: f64, stderr: f64| ResultRow {
            model: self.model.clone(),
            bernstein: self.bernstein.clone(),
            c: self.c,
            t,
            replicas,
            stat: format!("{stat}_{}", self.mode),
            mean,
            stderr,
        };
        let mut rows = Vec::new();
        for h in &self.horizons {
            rows.push(row(h.t, h.replicas, "sqrt_t_abs_mu", h.scaled_abs_mean, h.scaled_abs_stderr));
            rows.push(row(h.t, h.replicas, "t_mu_sq", h.scaled_second_moment, h.scaled_second_stderr));
            rows.push(row(h.t, h.replicas, "w1", h.w1_mean, h.w1_stderr));
            rows.push(row(h.t, h.replicas, "w1_dual_bound", h.dual_bound_mean, 0.0));
        }
        rows
    }
}

pub fn write_results_csv(rows: &[ResultRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One `predictions.csv` line; empty `eta` when the spectral sum diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub model: String,
    pub bernstein: String,
    pub c: f64,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub eta: Option<f64>,
    pub tail_bound: Option<f64>,
    /// Empty when `q_α = ∞`.
    pub q_alpha: Option<String>,
    pub gamma: String,
    pub regime: String,
}

/// Limit constant and rate regime of a configured model.
pub fn predict(cfg: &ExperimentConfig) -> Result<PredictionRow> {
    let model = ModelRegistry::default().build(&cfg.model, &cfg.params)?;
    let bern = cfg.bernstein()?;
    let reg = regime_for_model(model.as_ref(), &bern, cfg.p, cfg.q)?;
    let limit = match eta(model.as_ref(), &bern, None, 0.0) {
        Ok(l) => Some(l),
        Err(Error::Regime(_) | Error::Capability(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(PredictionRow {
        model: model.id().into(),
        bernstein: bern.to_string(),
        c: cfg.params.c,
        n: limit.as_ref().map(|l| l.n_modes),
        eta: limit.as_ref().map(|l| l.value),
        tail_bound: limit.as_ref().map(|l| l.tail_bound),
        q_alpha: reg.q_alpha.map(|q| q.to_string()),
        gamma: reg.gamma.to_string(),
        regime: reg.w2.to_string(),
    })
}

pub fn write_predictions_csv(rows: &[PredictionRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
