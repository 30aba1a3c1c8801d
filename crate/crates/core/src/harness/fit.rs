//! Rate fits `C/t`, `C log t / t` and `C t^{−γ}` in log space.

use serde::Serialize;

use crate::error::{input, Result};

/// ΔBIC below which the two best laws are reported as indistinguishable.
pub const BIC_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    InverseT,
    LogOverT,
    Power,
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Law::InverseT => "C/t",
            Law::LogOverT => "C log t/t",
            Law::Power => "C t^-gamma",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateFit {
    pub law: Law,
    pub log_c: f64,
    /// Decay exponent; fixed at 1 for the two `t^{−1}` laws.
    pub gamma: f64,
    /// Weighted residual sum of squares.
    pub chi2: f64,
    pub bic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    /// In the order `C/t`, `C log t/t`, `C t^{−γ}`.
    pub candidates: Vec<CandidateFit>,
    /// Smallest BIC.
    pub selected: Law,
    /// Regime read off the fit: `selected`, except that a power law with `γ̂`
    /// within 2 SE of 1 reads as `C/t`.
    pub regime: Law,
    /// ΔBIC between the best law and the best law describing a different
    /// regime. A power law whose `γ̂` is within 2 SE of 1 describes the same
    /// regime as `C/t` (the two are nested), so it is skipped as a rival.
    pub margin: f64,
    pub runner_up: Law,
    pub indistinguishable: bool,
    pub gamma_hat: f64,
    pub gamma_se: f64,
}

/// Weighted least squares of `log mean` against each law, with weights
/// `(mean/stderr)²`. Zero or non-finite errors fall back to unit weights.
pub fn fit_rate(horizons: &[f64], means: &[f64], errors: &[f64]) -> Result<RateFit> {
    let n = horizons.len();
    if n < 4 || means.len() != n || errors.len() != n {
        return Err(input(format!("rate fit needs ≥ 4 horizons with matching means and errors, got {n}")));
    }
    if means.iter().any(|m| !(*m > 0.0)) {
        return Err(input("rate fit needs positive means"));
    }
    if horizons.iter().any(|t| !(*t > 1.0)) {
        return Err(input("rate fit needs horizons above 1"));
    }
    let x: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let unit = errors.iter().any(|e| !(*e > 0.0 && e.is_finite()));
    let w: Vec<f64> =
        if unit { vec![1.0; n] } else { means.iter().zip(errors).map(|(m, e)| (m / e).powi(2)).collect() };
    let sw: f64 = w.iter().sum();
    let ln_n = (n as f64).ln();

    // one free intercept: y = a + shape(x)
    let one_param = |law: Law, shape: &dyn Fn(f64) -> f64| {
        let a = (0..n).map(|j| w[j] * (y[j] - shape(x[j]))).sum::<f64>() / sw;
        let chi2 = (0..n).map(|j| w[j] * (y[j] - shape(x[j]) - a).powi(2)).sum::<f64>();
        CandidateFit { law, log_c: a, gamma: 1.0, chi2, bic: chi2 + ln_n }
    };
    let inv = one_param(Law::InverseT, &|x| -x);
    let log = one_param(Law::LogOverT, &|x| x.ln() - x);

    let xm = (0..n).map(|j| w[j] * x[j]).sum::<f64>() / sw;
    let ym = (0..n).map(|j| w[j] * y[j]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|j| w[j] * (x[j] - xm).powi(2)).sum();
    let sxy: f64 = (0..n).map(|j| w[j] * (x[j] - xm) * (y[j] - ym)).sum();
    let slope = sxy / sxx;
    let a = ym - slope * xm;
    let chi2 = (0..n).map(|j| w[j] * (y[j] - a - slope * x[j]).powi(2)).sum::<f64>();
    let power = CandidateFit { law: Law::Power, log_c: a, gamma: -slope, chi2, bic: chi2 + 2.0 * ln_n };
    let gamma_se = if unit { (chi2 / (n as f64 - 2.0) / sxx).sqrt() } else { (1.0 / sxx).sqrt() };

    let candidates = vec![inv, log, power];
    let mut order: Vec<&CandidateFit> = candidates.iter().collect();
    order.sort_by(|p, q| p.bic.total_cmp(&q.bic));
    let inverse_like = (slope + 1.0).abs() <= 2.0 * gamma_se;
    let same_regime = |a: Law, b: Law| {
        a == b || (inverse_like && matches!((a, b), (Law::InverseT, Law::Power) | (Law::Power, Law::InverseT)))
    };
    let rival = order[1..].iter().find(|c| !same_regime(c.law, order[0].law)).unwrap_or(&order[1]);
    let margin = rival.bic - order[0].bic;
    Ok(RateFit {
        selected: order[0].law,
        regime: if order[0].law == Law::Power && inverse_like { Law::InverseT } else { order[0].law },
        runner_up: rival.law,
        margin,
        indistinguishable: margin < BIC_MARGIN,
        gamma_hat: -slope,
        gamma_se,
        candidates,
    })
}
