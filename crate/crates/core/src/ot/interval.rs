//! Monotone coupling on `[0,1]` with `ρ(x,y) = |g(x) − g(y)|`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::{abs_pow_antiderivative, check_order, sorted_steps, OTResult};
use crate::empirical::EmpiricalMeasure;
use crate::error::{capability, Result};
use crate::spectral::{OtGeometry, SpectralModel};

/// Continuous or discrete law on the line, seen through the metric
/// reparametrization `g`. `G = g ∘ Q` denotes its quantile in `g`-coordinates.
pub trait TargetLaw: Send + Sync {
    /// Monotone `g` mapping model coordinates to metric coordinates.
    fn transform(&self, x: f64) -> f64;

    /// `Σ_j ∫_{c_{j−1}}^{c_j} |y_j − G(u)|^p du` for sorted `ys` with
    /// cumulative weights `cum`, together with a bound on its error.
    fn step_cost(&self, ys: &[f64], cum: &[f64], p: f64) -> (f64, f64);
}

/// Uniform law on `[lo, hi]` with `g = id`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformTarget {
    pub lo: f64,
    pub hi: f64,
}

impl TargetLaw for UniformTarget {
    fn transform(&self, x: f64) -> f64 {
        x
    }

    fn step_cost(&self, ys: &[f64], cum: &[f64], p: f64) -> (f64, f64) {
        let len = self.hi - self.lo;
        let mut cost = 0.0;
        let mut mag = 0.0;
        let mut a = 0.0;
        for (y, &b) in ys.iter().zip(cum) {
            let sa = abs_pow_antiderivative(y - self.lo - len * a, p);
            let sb = abs_pow_antiderivative(y - self.lo - len * b, p);
            cost += (sa - sb) / len;
            mag += (sa.abs() + sb.abs()) / len;
            a = b;
        }
        (cost, 8.0 * f64::EPSILON * mag)
    }
}

/// Finitely supported law, already in metric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTarget {
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl DiscreteTarget {
    pub fn new(atoms: &[(f64, f64)]) -> Self {
        let (values, cum) = sorted_steps(atoms.to_vec());
        Self { values, cum }
    }
}

impl TargetLaw for DiscreteTarget {
    fn transform(&self, x: f64) -> f64 {
        x
    }

    fn step_cost(&self, ys: &[f64], cum: &[f64], p: f64) -> (f64, f64) {
        let (mut i, mut k) = (0, 0);
        let mut u = 0.0;
        let mut cost = 0.0;
        while i < ys.len() && k < self.values.len() {
            let next = cum[i].min(self.cum[k]);
            cost += (next - u).max(0.0) * (ys[i] - self.values[k]).abs().powf(p);
            u = next;
            if cum[i] <= next {
                i += 1;
            }
            if self.cum[k] <= next {
                k += 1;
            }
        }
        (cost, 8.0 * f64::EPSILON * cost * (ys.len() + self.values.len()) as f64)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Tabulated invariant law of an interval model.
///
/// Nodes sit at `x_k = sin²(θ_k)` on a uniform `θ` grid, which resolves both
/// ends. Partial moments `∫_0^{u_k} G` and `∫ G²` are integrated per panel by
/// Gauss–Legendre in `θ`; between nodes the monotonicity of `G` brackets
/// every remaining piece.
pub struct ModelTarget {
    model: Arc<dyn SpectralModel>,
    xs: Vec<f64>,
    us: Vec<f64>,
    gs: Vec<f64>,
    m1: Vec<f64>,
    m1_err: Vec<f64>,
    m2: f64,
    m2_err: f64,
}

impl std::fmt::Debug for ModelTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelTarget").field("nodes", &self.xs.len()).field("m2", &self.m2).finish()
    }
}

pub const TABLE_PANELS: usize = 1 << 16;

impl ModelTarget {
    pub fn new(model: Arc<dyn SpectralModel>) -> Result<Self> {
        Self::with_panels(model, TABLE_PANELS)
    }

    pub fn with_panels(model: Arc<dyn SpectralModel>, panels: usize) -> Result<Self> {
        if model.ot_geometry() != OtGeometry::Interval {
            return Err(capability(format!("{}: metric is not a monotone reparametrization of [0,1]", model.id())));
        }
        model.invariant_density(0.5)?;
        model.invariant_cdf(0.5)?;
        let xs: Vec<f64> = (0..=panels)
            .map(|k| {
                let s = (FRAC_PI_2 * k as f64 / panels as f64).sin();
                if k == panels {
                    1.0
                } else {
                    s * s
                }
            })
            .collect();
        let us: Vec<f64> = xs.iter().map(|&x| model.invariant_cdf(x)).collect::<Result<_>>()?;
        let gs: Vec<f64> = xs.iter().map(|&x| model.metric_transform(x)).collect();
        let hi = gauss_legendre(8);
        let lo = gauss_legendre(4);
        let h = FRAC_PI_2 / panels as f64;
        let panel = |k: usize, rule: &[(f64, f64)], power: i32| -> f64 {
            let mid = (k as f64 + 0.5) * h;
            rule.iter()
                .map(|(z, w)| {
                    let th = mid + 0.5 * h * z;
                    let (s, c) = th.sin_cos();
                    let x = s * s;
                    let dens = model.invariant_density(x).unwrap_or(0.0);
                    w * 0.5 * h * model.metric_transform(x).powi(power) * dens * 2.0 * s * c
                })
                .sum()
        };
        let mut m1 = vec![0.0; panels + 1];
        let mut m1_err = vec![0.0; panels + 1];
        let (mut m2, mut m2_err) = (0.0, 0.0);
        for k in 0..panels {
            let (a, b) = (panel(k, &hi, 1), panel(k, &lo, 1));
            // the bracket G_k Δu ≤ ∫ G ≤ G_{k+1} Δu always holds
            let bracket = (gs[k + 1] - gs[k]) * (us[k + 1] - us[k]);
            m1[k + 1] = m1[k] + a;
            m1_err[k + 1] = m1_err[k] + (a - b).abs().min(bracket) + 4.0 * f64::EPSILON * a.abs();
            let (a2, b2) = (panel(k, &hi, 2), panel(k, &lo, 2));
            m2 += a2;
            m2_err += (a2 - b2).abs() + 4.0 * f64::EPSILON * a2.abs();
        }
        Ok(Self { model, xs, us, gs, m1, m1_err, m2, m2_err })
    }

    /// Panel `k` with `u_k ≤ u ≤ u_{k+1}`.
    fn panel_of(&self, u: f64) -> usize {
        let k = self.us.partition_point(|&v| v <= u);
        k.saturating_sub(1).min(self.us.len() - 2)
    }

    /// `∫_0^u G` and its error bound.
    fn partial_mean(&self, u: f64) -> (f64, f64) {
        let k = self.panel_of(u);
        let du = (u - self.us[k]).max(0.0);
        let piece = 0.5 * (self.gs[k] + self.gs[k + 1]) * du;
        let err = 0.5 * (self.gs[k + 1] - self.gs[k]) * du;
        (self.m1[k] + piece, self.m1_err[k] + err)
    }

    /// `u*` with `G ≤ y` before and `G ≥ y` after.
    fn level(&self, y: f64) -> f64 {
        let k = self.gs.partition_point(|&v| v <= y);
        if k == 0 {
            return 0.0;
        }
        if k > self.gs.len() - 1 {
            return 1.0;
        }
        let (mut a, mut b) = (self.xs[k - 1], self.xs[k]);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.model.metric_transform(m) <= y {
                a = m;
            } else {
                b = m;
            }
        }
        self.model.invariant_cdf(0.5 * (a + b)).unwrap_or(0.0)
    }

    /// Bracketed integral of `|y − G|^p` over `[a, b]` by walking table panels.
    fn walk_segment(&self, y: f64, a: f64, b: f64, p: f64) -> (f64, f64) {
        let mut k = self.panel_of(a);
        let mut u = a;
        let (mut est, mut err) = (0.0, 0.0);
        while u < b && k + 1 < self.us.len() {
            let r = self.us[k + 1].min(b);
            let (f0, f1) = ((y - self.gs[k]).abs().powf(p), (y - self.gs[k + 1]).abs().powf(p));
            let (lo, hi) = if (self.gs[k] - y) * (self.gs[k + 1] - y) <= 0.0 {
                (0.0, f0.max(f1))
            } else {
                (f0.min(f1), f0.max(f1))
            };
            let len = (r - u).max(0.0);
            est += 0.5 * (lo + hi) * len;
            err += 0.5 * (hi - lo) * len;
            u = r;
            k += 1;
        }
        (est, err)
    }
}

impl TargetLaw for ModelTarget {
    fn transform(&self, x: f64) -> f64 {
        self.model.metric_transform(x)
    }

    fn step_cost(&self, ys: &[f64], cum: &[f64], p: f64) -> (f64, f64) {
        let mut a = 0.0;
        let (mut cost, mut err) = (0.0, 0.0);
        if p == 2.0 {
            // Σ w y² − 2 Σ y (M1(c_j) − M1(c_{j−1})) + ∫ G²
            let (mut prev, mut prev_err) = (0.0, 0.0);
            for (y, &b) in ys.iter().zip(cum) {
                let (m, e) = self.partial_mean(b);
                cost += (b - a) * y * y - 2.0 * y * (m - prev);
                err += 2.0 * y.abs() * (e + prev_err);
                a = b;
                prev = m;
                prev_err = e;
            }
            cost += self.m2;
            err += self.m2_err;
        } else if p == 1.0 {
            for (y, &b) in ys.iter().zip(cum) {
                let us = self.level(*y).clamp(a, b);
                let (ma, ea) = self.partial_mean(a);
                let (mb, eb) = self.partial_mean(b);
                let (ms, es) = self.partial_mean(us);
                cost += y * (2.0 * us - a - b) - 2.0 * ms + ma + mb;
                err += ea + eb + 2.0 * es;
                a = b;
            }
        } else {
            for (y, &b) in ys.iter().zip(cum) {
                let (c, e) = self.walk_segment(*y, a, b, p);
                cost += c;
                err += e;
                a = b;
            }
        }
        (cost, err)
    }
}

/// Target law for an interval model (uniform targets are handled exactly).
pub fn target_for(model: Arc<dyn SpectralModel>) -> Result<Box<dyn TargetLaw>> {
    if model.ot_geometry() != OtGeometry::Interval {
        return Err(capability(format!("{}: metric is not a monotone reparametrization of [0,1]", model.id())));
    }
    if model.id() == "interval-neumann" {
        return Ok(Box::new(UniformTarget { lo: 0.0, hi: 1.0 }));
    }
    Ok(Box::new(ModelTarget::new(model)?))
}

/// `W_p` between an empirical measure and a target law by the monotone coupling.
pub fn wp_interval(emp: &EmpiricalMeasure, target: &dyn TargetLaw, p: f64) -> Result<OTResult> {
    check_order(p)?;
    let atoms: Vec<(f64, f64)> = emp.scalar_atoms()?.into_iter().map(|(x, w)| (target.transform(x), w)).collect();
    let (ys, cum) = sorted_steps(atoms);
    let (cost, bound) = target.step_cost(&ys, &cum, p);
    Ok(OTResult::from_cost(p, cost, bound, "quantile"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ConditionedInterval, IntervalNeumann, StatePoint, WrightFisher};

    fn emp(points: &[(f64, f64)]) -> EmpiricalMeasure {
        let (xs, ws): (Vec<_>, Vec<_>) = points.iter().map(|&(x, w)| (StatePoint::Unit(x), w)).unzip();
        EmpiricalMeasure::new(xs, ws, 1.0).unwrap()
    }

    /// Target replaced by `n` equal atoms at mid-quantiles, seen through the model metric.
    struct Discretized {
        model: Arc<dyn SpectralModel>,
        atoms: DiscreteTarget,
    }

    impl TargetLaw for Discretized {
        fn transform(&self, x: f64) -> f64 {
            self.model.metric_transform(x)
        }

        fn step_cost(&self, ys: &[f64], cum: &[f64], p: f64) -> (f64, f64) {
            self.atoms.step_cost(ys, cum, p)
        }
    }

    fn quantile_atoms(model: &dyn SpectralModel, n: usize) -> DiscreteTarget {
        let atoms: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let x = model.invariant_quantile((k as f64 + 0.5) / n as f64).unwrap().scalar().unwrap();
                (model.metric_transform(x), 1.0 / n as f64)
            })
            .collect();
        DiscreteTarget::new(&atoms)
    }

    #[test]
    fn point_mass_against_uniform() {
        let u = UniformTarget { lo: 0.0, hi: 1.0 };
        let r = wp_interval(&emp(&[(0.5, 1.0)]), &u, 2.0).unwrap();
        assert!((r.cost - 1.0 / 12.0).abs() < 1e-15);
        let r = wp_interval(&emp(&[(0.0, 1.0)]), &u, 1.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        let r = wp_interval(&emp(&[(0.0, 1.0)]), &u, 3.0).unwrap();
        assert!((r.cost - 0.25).abs() < 1e-15);
    }

    #[test]
    fn discrete_targets() {
        let t = DiscreteTarget::new(&[(1.0, 1.0)]);
        assert!((wp_interval(&emp(&[(0.0, 1.0)]), &t, 1.0).unwrap().value - 1.0).abs() < 1e-15);
        let t = DiscreteTarget::new(&[(0.2, 0.5), (0.9, 0.5)]);
        let r = wp_interval(&emp(&[(0.2, 0.25), (0.4, 0.75)]), &t, 2.0).unwrap();
        // 0.25 stays, 0.25 moves 0.2 -> 0.4, 0.5 moves 0.9 -> 0.4
        assert!((r.cost - (0.25 * 0.04 + 0.5 * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn quantile_grid_is_close_to_uniform() {
        let u = UniformTarget { lo: 0.0, hi: 1.0 };
        for m in [3usize, 10, 101] {
            let pts: Vec<_> = (0..m).map(|k| ((k as f64 + 0.5) / m as f64, 1.0 / m as f64)).collect();
            let r = wp_interval(&emp(&pts), &u, 2.0).unwrap();
            // each atom spreads over a cell of width 1/m
            assert!((r.cost - 1.0 / (12.0 * (m * m) as f64)).abs() < 1e-14);
            assert!(r.value < 2.0 / m as f64);
        }
    }

    #[test]
    fn model_targets_match_fine_discretization() {
        let models: Vec<Arc<dyn SpectralModel>> = vec![
            Arc::new(ConditionedInterval),
            Arc::new(WrightFisher::new(1.0, 1.0).unwrap()),
            Arc::new(WrightFisher::new(0.6, 2.5).unwrap()),
        ];
        let e = emp(&[(0.03, 0.2), (0.35, 0.3), (0.5, 0.1), (0.97, 0.4)]);
        for model in models {
            let fine = Discretized { atoms: quantile_atoms(model.as_ref(), 200_000), model: model.clone() };
            let t = ModelTarget::new(model.clone()).unwrap();
            for p in [1.0, 1.5, 2.0, 3.0] {
                let got = wp_interval(&e, &t, p).unwrap();
                let reference = wp_interval(&e, &fine, p).unwrap();
                assert!(
                    got.bound < if p == 1.0 || p == 2.0 { 1e-6 } else { 1e-4 },
                    "{} p={p}: bound {}",
                    model.id(),
                    got.bound
                );
                assert!(
                    (got.value - reference.value).abs() < 1e-4,
                    "{} p={p}: {} vs {}",
                    model.id(),
                    got.value,
                    reference.value
                );
            }
        }
    }

    #[test]
    fn target_selection() {
        assert!(target_for(Arc::new(IntervalNeumann)).is_ok());
        assert!(target_for(Arc::new(crate::spectral::Circle::new(0.0))).is_err());
    }
}
