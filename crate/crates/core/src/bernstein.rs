//! Bernstein functions `B` and exact sampling of the subordinator `S^B`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{input, parameter, Result};
use crate::rng::StreamRng;

/// Laplace exponent of a subordinator: `E[e^{−r S_t}] = e^{−B(r) t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinFn {
    /// `B(r) = r`, i.e. no subordination.
    Identity,
    /// `B(r) = r^α`.
    Stable { alpha: f64 },
    /// `B(r) = b r + r^α`.
    DriftPlusStable { b: f64, alpha: f64 },
}

/// Config form: `{"kind": "stable", "alpha": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(parameter(format!("stable index alpha={alpha} must lie in (0,1)")));
    }
    Ok(())
}

impl BernsteinFn {
    pub fn stable(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Stable { alpha })
    }

    pub fn drift_plus_stable(b: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(b >= 0.0 && b.is_finite()) {
            return Err(parameter(format!("drift b={b} must be finite and non-negative")));
        }
        Ok(Self::DriftPlusStable { b, alpha })
    }

    pub fn from_config(cfg: &BernsteinConfig) -> Result<Self> {
        let need_alpha = || cfg.alpha.ok_or_else(|| parameter(format!("bernstein kind '{}' needs alpha", cfg.kind)));
        match cfg.kind.as_str() {
            "identity" => Ok(Self::Identity),
            "stable" => Self::stable(need_alpha()?),
            "drift+stable" | "drift_plus_stable" => Self::drift_plus_stable(cfg.drift.unwrap_or(0.0), need_alpha()?),
            other => Err(crate::Error::UnknownId { kind: "bernstein", id: other.to_string() }),
        }
    }

    pub fn to_config(&self) -> BernsteinConfig {
        match *self {
            Self::Identity => BernsteinConfig { kind: "identity".into(), alpha: None, drift: None },
            Self::Stable { alpha } => BernsteinConfig { kind: "stable".into(), alpha: Some(alpha), drift: None },
            Self::DriftPlusStable { b, alpha } => {
                BernsteinConfig { kind: "drift+stable".into(), alpha: Some(alpha), drift: Some(b) }
            }
        }
    }

    pub fn evaluate(&self, r: f64) -> f64 {
        match *self {
            Self::Identity => r,
            Self::Stable { alpha } => r.powf(alpha),
            Self::DriftPlusStable { b, alpha } => b * r + r.powf(alpha),
        }
    }

    /// Analytic continuation to `Re z ≥ 0` (principal branch of `z^α`).
    pub fn evaluate_complex(&self, z: Complex64) -> Complex64 {
        let pow = |alpha: f64| if z == Complex64::new(0.0, 0.0) { z } else { z.powf(alpha) };
        match *self {
            Self::Identity => z,
            Self::Stable { alpha } => pow(alpha),
            Self::DriftPlusStable { b, alpha } => z * b + pow(alpha),
        }
    }

    /// Largest `α` with `B ∈ B^α`.
    pub fn alpha_lower(&self) -> f64 {
        match *self {
            Self::Identity => 1.0,
            Self::Stable { alpha } => alpha,
            Self::DriftPlusStable { b, alpha } => {
                if b > 0.0 {
                    1.0
                } else {
                    alpha
                }
            }
        }
    }

    /// Smallest `α′` with `B ∈ B_{α′}`.
    pub fn alpha_upper(&self) -> f64 {
        self.alpha_lower()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity)
    }

    /// One draw of `S_dt`.
    pub fn sample_increment(&self, dt: f64, rng: &mut StreamRng) -> Result<f64> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(input(format!("increment length {dt} must be finite and non-negative")));
        }
        Ok(match *self {
            Self::Identity => dt,
            Self::Stable { alpha } => stable_part(alpha, dt, rng),
            Self::DriftPlusStable { b, alpha } => b * dt + stable_part(alpha, dt, rng),
        })
    }

    /// `S` on a strictly increasing grid, started from `S_{t_0} = 0`.
    pub fn sample_path(&self, times: &[f64], rng: &mut StreamRng) -> Result<SubordinatorPath> {
        if times.is_empty() {
            return Err(input("empty time grid"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(input("time grid must be strictly increasing"));
        }
        let mut values = Vec::with_capacity(times.len());
        let mut s = 0.0;
        values.push(s);
        for w in times.windows(2) {
            s += self.sample_increment(w[1] - w[0], rng)?;
            values.push(s);
        }
        Ok(SubordinatorPath { times: times.to_vec(), values })
    }
}

impl fmt::Display for BernsteinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Identity => write!(f, "identity"),
            Self::Stable { alpha } => write!(f, "stable({alpha})"),
            Self::DriftPlusStable { b, alpha } => write!(f, "drift+stable({b},{alpha})"),
        }
    }
}

/// Kanter's representation of the one-sided stable law with `E[e^{−rA}] = e^{−r^α}`.
pub fn sample_kanter(alpha: f64, rng: &mut StreamRng) -> f64 {
    let u: f64 = rng.sample(Open01);
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * PI * u).sin() / (PI * u).sin().powf(1.0 / alpha);
    let b = ((1.0 - alpha) * PI * u).sin() / w;
    (a * b.powf((1.0 - alpha) / alpha)).max(0.0)
}

fn stable_part(alpha: f64, dt: f64, rng: &mut StreamRng) -> f64 {
    if dt == 0.0 {
        return 0.0;
    }
    dt.powf(1.0 / alpha) * sample_kanter(alpha, rng)
}

/// Values of `S` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinatorPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SubordinatorPath {
    /// `S_{t_{j+1}} − S_{t_j}`.
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use proptest::prelude::*;

    fn laplace_check(b: BernsteinFn, r: f64, n: usize, seed: u64) -> (f64, f64, f64) {
        let mut rng = stream(seed, 0, Purpose::Subordinator);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let v = (-r * b.sample_increment(1.0, &mut rng).unwrap()).exp();
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        let sd = (sq / n as f64 - mean * mean).max(0.0).sqrt();
        (mean, sd / (n as f64).sqrt(), (-b.evaluate(r)).exp())
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(BernsteinFn::Identity.evaluate(3.0), 3.0);
        assert_eq!(BernsteinFn::stable(0.5).unwrap().evaluate(4.0), 2.0);
        assert_eq!(BernsteinFn::drift_plus_stable(1.0, 0.5).unwrap().evaluate(4.0), 6.0);
    }

    #[test]
    fn class_indices() {
        assert_eq!(BernsteinFn::Identity.alpha_lower(), 1.0);
        let s = BernsteinFn::stable(0.3).unwrap();
        assert_eq!((s.alpha_lower(), s.alpha_upper()), (0.3, 0.3));
    }

    #[test]
    fn rejects_degenerate_alpha() {
        assert!(BernsteinFn::stable(1.0).is_err());
        assert!(BernsteinFn::stable(0.0).is_err());
        assert!(BernsteinFn::drift_plus_stable(-1.0, 0.5).is_err());
    }

    #[test]
    fn identity_increment_is_deterministic() {
        let mut rng = stream(1, 0, Purpose::Subordinator);
        assert_eq!(BernsteinFn::Identity.sample_increment(0.7, &mut rng).unwrap(), 0.7);
    }

    #[test]
    fn stable_half_laplace_at_one_and_four() {
        let b = BernsteinFn::stable(0.5).unwrap();
        for (r, want) in [(1.0, 0.36788), (4.0, 0.13534)] {
            let (mean, se, exact) = laplace_check(b, r, 1_000_000, 11);
            assert!((exact - want).abs() < 1e-5);
            assert!((mean - exact).abs() < 3.0 * se, "r={r}: {mean} vs {exact} (se {se})");
        }
    }

    #[test]
    fn laplace_suite_over_catalog() {
        let cat = [
            BernsteinFn::Identity,
            BernsteinFn::stable(0.3).unwrap(),
            BernsteinFn::stable(0.75).unwrap(),
            BernsteinFn::drift_plus_stable(1.0, 0.5).unwrap(),
        ];
        for (k, b) in cat.iter().enumerate() {
            for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
                let (mean, se, exact) = laplace_check(*b, r, 1_000_000, 100 + k as u64);
                assert!((mean - exact).abs() <= 3.0 * se + 1e-9, "{b} r={r}: {mean} vs {exact}");
            }
        }
    }

    #[test]
    fn complex_continuation_matches_real_axis() {
        let b = BernsteinFn::drift_plus_stable(0.5, 0.4).unwrap();
        let z = b.evaluate_complex(Complex64::new(3.0, 0.0));
        assert!((z.re - b.evaluate(3.0)).abs() < 1e-12 && z.im.abs() < 1e-12);
    }

    #[test]
    fn path_rejects_non_monotone_grid() {
        let mut rng = stream(1, 0, Purpose::Subordinator);
        assert!(BernsteinFn::Identity.sample_path(&[0.0, 1.0, 1.0], &mut rng).is_err());
        let p = BernsteinFn::Identity.sample_path(&[0.0, 0.5, 2.0], &mut rng).unwrap();
        assert_eq!(p.values, vec![0.0, 0.5, 2.0]);
    }

    fn ks_statistic(mut x: Vec<f64>, mut y: Vec<f64>) -> f64 {
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < x.len() && j < y.len() {
            if x[i] <= y[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
        }
        d
    }

    #[test]
    fn stable_self_similarity() {
        let alpha = 0.6;
        let b = BernsteinFn::stable(alpha).unwrap();
        let n = 20_000;
        let draw = |t: f64, seed: u64| -> Vec<f64> {
            let mut rng = stream(seed, 0, Purpose::Subordinator);
            (0..n).map(|_| b.sample_increment(t, &mut rng).unwrap() / t.powf(1.0 / alpha)).collect()
        };
        let d = ks_statistic(draw(1.0, 5), draw(4.0, 6));
        let crit = (-(1e-3f64 / 2.0).ln() / 2.0).sqrt() * (2.0 / n as f64).sqrt();
        assert!(d < crit, "KS {d} vs {crit}");
    }

    #[test]
    fn disjoint_increments_uncorrelated() {
        let b = BernsteinFn::stable(0.5).unwrap();
        let mut rng = stream(9, 0, Purpose::Subordinator);
        let n = 100_000;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let p = b.sample_path(&[0.0, 1.0, 2.0], &mut rng).unwrap();
                let mut inc = p.increments();
                ((-inc.next().unwrap()).exp(), (-inc.next().unwrap()).exp())
            })
            .collect();
        let mean = |f: &dyn Fn(&(f64, f64)) -> f64| pairs.iter().map(f).sum::<f64>() / n as f64;
        let (mx, my) = (mean(&|p| p.0), mean(&|p| p.1));
        let cov = mean(&|p| (p.0 - mx) * (p.1 - my));
        let corr = cov / (mean(&|p| (p.0 - mx).powi(2)) * mean(&|p| (p.1 - my).powi(2))).sqrt();
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
    }

    proptest! {
        #[test]
        fn paths_are_non_decreasing(seed in any::<u64>(), alpha in 0.05f64..0.95, n in 2usize..40) {
            let mut rng = stream(seed, 0, Purpose::Subordinator);
            let times: Vec<f64> = (0..n).map(|j| j as f64 * 0.37).collect();
            let b = BernsteinFn::stable(alpha).unwrap();
            let p = b.sample_path(&times, &mut rng).unwrap();
            prop_assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
            prop_assert_eq!(p.values[0], 0.0);
        }

        #[test]
        fn bernstein_is_increasing(alpha in 0.05f64..0.95, b in 0.0f64..3.0, r in 0.0f64..50.0) {
            let f = BernsteinFn::drift_plus_stable(b, alpha).unwrap();
            prop_assert!(f.evaluate(r + 0.1) > f.evaluate(r));
            prop_assert_eq!(f.evaluate(0.0), 0.0);
        }
    }
}
