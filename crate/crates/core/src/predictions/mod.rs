//! Limit constants `η_Z^B`, asymptotic variances and rate regimes.

mod regime;
mod variance;

use serde::Serialize;

pub use regime::{alpha_threshold, gamma, integer_part, q_alpha, regime, Rate, RateRegime, RegimeInputs, Q};
pub use variance::{
    circle_drift_variance, green_kubo, rotation_rate, subordinator_mc, v_b, v_b_closed_form, zn1, GreenKubo,
    GreenKuboConfig, Provenance, VbEstimate, VbMethod,
};

use crate::bernstein::BernsteinFn;
use crate::error::{capability, input, Error, Result};
use crate::spectral::SpectralModel;

/// Relative tail accuracy targeted when no truncation is given.
pub const ETA_RELATIVE_TAIL: f64 = 1e-4;
const ETA_START_MODES: usize = 1 << 10;
const ETA_MAX_MODES: usize = 1 << 20;

/// `η = Σ 2e^{−2rλ_i} V_B(φ_i)/λ_i` truncated after `n_modes` modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitConstant {
    pub value: f64,
    pub n_modes: usize,
    /// Bound on the omitted terms.
    pub tail_bound: f64,
    pub provenance: Provenance,
}

/// `η_{Z,r}^B` for the model's drift. `n_modes = None` grows the truncation
/// until the tail bound is below `ETA_RELATIVE_TAIL` of the value.
pub fn eta(model: &dyn SpectralModel, bern: &BernsteinFn, n_modes: Option<usize>, r: f64) -> Result<LimitConstant> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(input(format!("smoothing time r={r} must be finite and non-negative")));
    }
    let d_prime = model.dims().d_prime;
    let alpha = bern.alpha_lower();
    if r == 0.0 && d_prime >= 2.0 * (1.0 + alpha) {
        return Err(Error::Regime(format!(
            "{}: η diverges since d′={d_prime} ≥ 2(1+α)={}; E[W₂²] then decays like t⁻¹log t or slower",
            model.id(),
            2.0 * (1.0 + alpha)
        )));
    }
    match n_modes {
        Some(n) => eta_truncated(model, bern, n, r),
        None => {
            let mut n = ETA_START_MODES;
            loop {
                let lc = eta_truncated(model, bern, n, r)?;
                if lc.tail_bound <= ETA_RELATIVE_TAIL * lc.value || n >= ETA_MAX_MODES {
                    return Ok(lc);
                }
                n *= 4;
            }
        }
    }
}

fn eta_truncated(model: &dyn SpectralModel, bern: &BernsteinFn, n: usize, r: f64) -> Result<LimitConstant> {
    if n == 0 {
        return Err(input("η needs at least one mode"));
    }
    let mut modes = model.eigen_data(n + 1)?;
    // keep whole eigenvalue shells only
    let mut keep = n.min(modes.len());
    while keep > 0 && keep < modes.len() && modes[keep].lambda <= modes[keep - 1].lambda * (1.0 + 1e-12) {
        keep -= 1;
    }
    if keep == 0 {
        return Err(input(format!("first eigenvalue shell has more than {n} modes")));
    }
    modes.truncate(keep);
    let drift = model.drift();
    let mut terms = Vec::with_capacity(keep);
    for m in &modes {
        let v = v_b_closed_form(bern, m.lambda, rotation_rate(drift, m)?);
        terms.push(2.0 * (-2.0 * r * m.lambda).exp() * v / m.lambda);
    }
    let value = terms.iter().rev().sum();
    let tail_bound = spectral_tail(model, bern, modes[keep - 1].lambda, keep, r)?;
    Ok(LimitConstant { value, n_modes: keep, tail_bound, provenance: Provenance::Analytic })
}

/// Bound on `Σ_{λ_i > Λ} 2e^{−2rλ_i}/(λ_i B(λ_i))`, which dominates the omitted
/// terms because `Re 1/B(λ − iκ) ≤ 1/B(λ)`.
///
/// Abel summation over the shells `(Λρ^{j−1}, Λρ^j]` with the counting bound
/// `N̄`: the tail is at most `−N(Λ)f(Λ) + Σ_j N̄(Λρ^j)(f(Λρ^{j−1}) − f(Λρ^j))`.
fn spectral_tail(model: &dyn SpectralModel, bern: &BernsteinFn, lambda: f64, counted: usize, r: f64) -> Result<f64> {
    const RHO: f64 = 1.05;
    let f = |x: f64| 2.0 * (-2.0 * r * x).exp() / (x * bern.evaluate(x));
    let nbar = |x: f64| {
        model.counting_bound(x).ok_or_else(|| capability(format!("{}: no eigenvalue counting bound", model.id())))
    };
    let mut total = -(counted as f64) * f(lambda);
    let mut x = lambda;
    for _ in 0..200_000 {
        let next = x * RHO;
        let (fx, fn_) = (f(x), f(next));
        let count = nbar(next)?;
        total += count * (fx - fn_);
        x = next;
        // what is left is of the order of N̄(x) f(x)
        if count * fn_ <= 1e-15 * total.abs().max(f64::MIN_POSITIVE) || !x.is_finite() {
            return Ok(total.max(0.0) + count * fn_);
        }
    }
    Err(Error::Regime(format!("{}: spectral tail decays too slowly to bound", model.id())))
}

/// CLT prediction for `√t μ_t(s·φ_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltLimit {
    /// `V_B(s·φ_i)`.
    pub v: f64,
    /// Variance of the Gaussian limit, `2V`.
    pub clt_variance: f64,
    /// `lim √t E|μ_t(sφ_i)| = √(2·2V/π)`.
    pub abs_moment_limit: f64,
}

/// Asymptotic variance and absolute-moment limit for the scaled mode `s·φ_i`.
///
/// `t E[μ_t(φ)²] → 2V(φ)`, so the Gaussian limit has variance `2V` and mean
/// absolute value `√(4V/π)`.
pub fn clt_limits(model: &dyn SpectralModel, bern: &BernsteinFn, i: usize, scale: f64) -> Result<CltLimit> {
    let v = scale * scale * v_b(model, bern, i, &VbMethod::Analytic)?.value;
    Ok(CltLimit { v, clt_variance: 2.0 * v, abs_moment_limit: (4.0 * v / std::f64::consts::PI).sqrt() })
}

/// Regime of a model driven by `B`, with `(d, d′)` from the model and `α` from `B`.
pub fn regime_for_model(model: &dyn SpectralModel, bern: &BernsteinFn, p: f64, q: f64) -> Result<RateRegime> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(input(format!("moment orders p={p}, q={q} must be at least 1")));
    }
    let dims = model.dims();
    Ok(regime(RegimeInputs::from_f64(dims.d, dims.d_prime, bern.alpha_lower(), p, q)))
}
