//! Asymptotic variances `V_B(φ_i) = ∫_0^∞ μ(φ_i P_s^B φ_i) ds`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::BernsteinFn;
use crate::error::{capability, input, Result};
use crate::rng::{stream, Purpose, StreamKey};
use crate::simulate::{simulate_subordinated, InitLaw};
use crate::spectral::{Drift, EigenMode, ModeFn, SpectralModel, StepControl};

/// How `V_B` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    GreenKubo,
    SubordinatorMc,
}

/// Settings for the Green–Kubo estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKuboConfig {
    /// Length of each stationary path.
    pub horizon: f64,
    /// Sampling step of the subordinated path.
    pub delta: f64,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VbMethod {
    Analytic,
    SubordinatorMc { draws: usize, seed: u64 },
    GreenKubo(GreenKuboConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VbEstimate {
    pub value: f64,
    /// Zero for closed forms.
    pub std_err: f64,
    pub provenance: Provenance,
    /// Truncation lag (in time units) of the Green–Kubo integral.
    pub lag: Option<f64>,
}

/// Rotation speed `κ` of mode `φ` under the constant drift: `μ(φ P_u φ) = e^{−λu} cos(κu)`.
pub fn rotation_rate(drift: Drift, mode: &EigenMode) -> Result<f64> {
    if drift.is_zero() {
        return Ok(0.0);
    }
    match (drift, &mode.evaluator) {
        (Drift::Circle(c), Some(ModeFn::CircleCos(k) | ModeFn::CircleSin(k))) => Ok(*k as f64 * c),
        (Drift::Torus(c), Some(ModeFn::TorusFourier { k, .. })) => Ok(k[0] as f64 * c[0] + k[1] as f64 * c[1]),
        _ => Err(capability(format!("no closed form for V_B of mode {} under drift {drift:?}", mode.index))),
    }
}

/// `V_B = Re 1/B(λ − iκ)`: averaging `Re e^{−(λ−iκ)S_s}` over the clock gives
/// `Re e^{−s B(λ−iκ)}`, whose integral over `s` is the claim.
pub fn v_b_closed_form(bern: &BernsteinFn, lambda: f64, kappa: f64) -> f64 {
    (1.0 / bern.evaluate_complex(Complex64::new(lambda, -kappa))).re
}

/// `V(Zφ_k) = c²k²/(k² + c²)` for the circle mode of frequency `k` and drift `c`.
pub fn circle_drift_variance(k: u32, c: f64) -> f64 {
    let k2 = (k as f64).powi(2);
    c * c * k2 / (k2 + c * c)
}

/// `V(φ) = λ⁻¹ − λ⁻² V(Zφ)` for an eigenfunction of the symmetric part.
pub fn zn1(lambda: f64, v_z: f64) -> f64 {
    1.0 / lambda - v_z / (lambda * lambda)
}

/// `V_B(φ_i)` of the `i`-th mode (`i ≥ 1`).
pub fn v_b(model: &dyn SpectralModel, bern: &BernsteinFn, i: usize, method: &VbMethod) -> Result<VbEstimate> {
    if i == 0 {
        return Err(input("V_B is defined for non-constant modes i ≥ 1"));
    }
    let mode = model.eigen_data(i)?.pop().ok_or_else(|| input("empty spectrum"))?;
    match *method {
        VbMethod::Analytic => {
            let kappa = rotation_rate(model.drift(), &mode)?;
            Ok(VbEstimate {
                value: v_b_closed_form(bern, mode.lambda, kappa),
                std_err: 0.0,
                provenance: Provenance::Analytic,
                lag: None,
            })
        }
        VbMethod::SubordinatorMc { draws, seed } => {
            let kappa = rotation_rate(model.drift(), &mode)?;
            let (value, std_err) = subordinator_mc(bern, mode.lambda, kappa, draws, seed)?;
            Ok(VbEstimate { value, std_err, provenance: Provenance::SubordinatorMc, lag: None })
        }
        VbMethod::GreenKubo(cfg) => {
            if mode.evaluator.is_none() {
                return Err(capability(format!("{}: modes cannot be evaluated", model.id())));
            }
            let series = (0..cfg.replicas)
                .into_par_iter()
                .map(|r| {
                    let key = StreamKey::new(cfg.seed, 0, r as u32, Purpose::Diffusion);
                    let path = simulate_subordinated(
                        model,
                        bern,
                        cfg.horizon,
                        cfg.delta,
                        &InitLaw::Invariant,
                        &StepControl::default(),
                        key,
                    )?;
                    Ok(path.states.iter().map(|x| mode.eval(x).unwrap_or(0.0)).collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            let gk = green_kubo(&series, cfg.delta)?;
            Ok(VbEstimate {
                value: gk.value,
                std_err: gk.std_err,
                provenance: Provenance::GreenKubo,
                lag: Some(gk.lag),
            })
        }
    }
}

/// `E ∫_0^∞ e^{−λS_s} cos(κS_s) ds` by sampling clock paths.
///
/// Each path is integrated by the trapezoid rule at steps `h` and `h/2` and
/// combined by Richardson extrapolation; the expected integrand is smooth in
/// `s`, so the remaining quadrature bias is `O(h⁴)`. Paths stop once
/// `λS > 40`.
pub fn subordinator_mc(bern: &BernsteinFn, lambda: f64, kappa: f64, draws: usize, seed: u64) -> Result<(f64, f64)> {
    if draws < 2 {
        return Err(input("subordinator MC needs at least two draws"));
    }
    if !(lambda > 0.0) {
        return Err(input(format!("eigenvalue {lambda} must be positive")));
    }
    let h = 0.02 / bern.evaluate(lambda);
    const CHUNKS: usize = 64;
    let per_chunk: Vec<(f64, f64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u32, Purpose::Auxiliary);
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in (c..draws).step_by(CHUNKS) {
                let g = |s: f64| (-lambda * s).exp() * (kappa * s).cos();
                let (mut fine, mut coarse) = (0.5 * g(0.0), 0.5 * g(0.0));
                let mut s = 0.0;
                loop {
                    let mid = s + bern.sample_increment(0.5 * h, &mut rng)?;
                    let end = mid + bern.sample_increment(0.5 * h, &mut rng)?;
                    let (gm, ge) = (g(mid), g(end));
                    s = end;
                    if lambda * s > 40.0 {
                        fine += gm + 0.5 * ge;
                        coarse += 0.5 * ge;
                        break;
                    }
                    fine += gm + ge;
                    coarse += ge;
                }
                let v = (4.0 * 0.5 * h * fine - h * coarse) / 3.0;
                sum += v;
                sum2 += v * v;
            }
            Ok((sum, sum2))
        })
        .collect::<Result<_>>()?;
    let n = draws as f64;
    let (sum, sum2) = per_chunk.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = sum / n;
    let var = ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenKubo {
    pub value: f64,
    pub std_err: f64,
    /// Integration cut-off in time units.
    pub lag: f64,
}

/// Integrated autocovariance of stationary, mean-zero series sampled every `dt`.
///
/// The pooled autocovariance is summed up to the first lag after which it
/// stays within its Bartlett noise band for 5 consecutive inspected lags.
/// Lags are inspected with spacing `⌈ℓ/10⌉`, so the slow zero crossing of an
/// oscillating autocovariance is not taken for decorrelation. With several
/// series the standard error is the spread of per-series integrals at that
/// cut-off; a single series falls back to `V·√(2(2L+1)/n)`.
pub fn green_kubo(series: &[Vec<f64>], dt: f64) -> Result<GreenKubo> {
    let n = series.iter().map(Vec::len).min().unwrap_or(0);
    if n < 16 {
        return Err(input("Green–Kubo needs at least 16 samples per series"));
    }
    let total = (series.len() * n) as f64;
    let autocov =
        |x: &[f64], lag: usize| x[..n - lag].iter().zip(&x[lag..n]).map(|(a, b)| a * b).sum::<f64>() / (n - lag) as f64;
    let pooled = |lag: usize| series.iter().map(|x| autocov(x, lag)).sum::<f64>() / series.len() as f64;
    let c0 = pooled(0);
    let mut cs = vec![c0];
    let mut sq = c0 * c0;
    let mut quiet = 0;
    let mut run_start = 0;
    let mut next_check = 1;
    let mut cut = None;
    for lag in 1..n / 2 {
        let c = pooled(lag);
        let noise = 2.0 * (sq / total).sqrt();
        cs.push(c);
        sq += 2.0 * c * c;
        if lag < next_check {
            continue;
        }
        next_check = lag + lag.div_ceil(10);
        if c.abs() < noise {
            if quiet == 0 {
                run_start = lag;
            }
            quiet += 1;
            if quiet == 5 {
                cut = Some(run_start);
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let cut = cut.unwrap_or(cs.len() - 1);
    let integral = |c: &dyn Fn(usize) -> f64| dt * (0.5 * c(0) + (1..=cut).map(c).sum::<f64>());
    let value = integral(&|l| cs[l]);
    let std_err = if series.len() >= 2 {
        let per: Vec<f64> = series.iter().map(|x| integral(&|l| autocov(x, l))).collect();
        let m = per.len() as f64;
        let mean = per.iter().sum::<f64>() / m;
        (per.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt()
    } else {
        value.abs() * (2.0 * (2 * cut + 1) as f64 / n as f64).sqrt()
    };
    Ok(GreenKubo { value, std_err, lag: cut as f64 * dt })
}
