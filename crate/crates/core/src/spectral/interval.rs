use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    dirichlet_ratio, numeric_lipschitz_unit, Boundary, Dims, EigenMode, ModeFn, OtGeometry, SpectralModel, StatePoint,
    StepControl, SturmLiouville,
};
use crate::error::{input, Result};
use crate::rng::StreamRng;

fn unit(x: &StatePoint) -> f64 {
    match *x {
        StatePoint::Unit(u) => u,
        _ => panic!("interval state expected, got {x:?}"),
    }
}

fn check_level(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(input(format!("quantile level {u} outside [0,1]")))
    }
}

/// Fold a real number into `[0,1]` by reflection at both ends.
pub(crate) fn reflect_unit(x: f64) -> f64 {
    let y = x.rem_euclid(2.0);
    if y > 1.0 {
        2.0 - y
    } else {
        y
    }
}

/// Invert a continuous increasing CDF on `[0,1]` by bisection.
pub(crate) fn bisect_quantile(cdf: impl Fn(f64) -> f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Reflecting Brownian motion on `[0,1]` with `L̂ = d²/dx²` (Neumann ends).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntervalNeumann;

impl SpectralModel for IntervalNeumann {
    fn id(&self) -> &'static str {
        "interval-neumann"
    }

    fn dims(&self) -> Dims {
        Dims { d: 1.0, d_prime: 1.0, d_dprime: 1.0 }
    }

    fn counting_bound(&self, lambda: f64) -> Option<f64> {
        Some(lambda.max(0.0).sqrt() / PI)
    }

    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>> {
        Ok((1..=n_modes)
            .map(|k| EigenMode {
                index: k,
                lambda: (k as f64 * PI).powi(2),
                multiplicity: 1,
                evaluator: Some(ModeFn::NeumannCos(k as u32)),
            })
            .collect())
    }

    fn distance(&self, x: &StatePoint, y: &StatePoint) -> f64 {
        (unit(x) - unit(y)).abs()
    }

    fn contains(&self, x: &StatePoint) -> bool {
        matches!(*x, StatePoint::Unit(u) if (0.0..=1.0).contains(&u))
    }

    fn invariant_quantile(&self, u: f64) -> Result<StatePoint> {
        check_level(u)?;
        Ok(StatePoint::Unit(u))
    }

    fn invariant_cdf(&self, x: f64) -> Result<f64> {
        Ok(x.clamp(0.0, 1.0))
    }

    fn invariant_density(&self, x: f64) -> Result<f64> {
        Ok(if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 })
    }

    fn sample_invariant(&self, rng: &mut StreamRng) -> Result<StatePoint> {
        Ok(StatePoint::Unit(rng.random::<f64>()))
    }

    fn advance(&self, x: &StatePoint, duration: f64, _ctl: &StepControl, rng: &mut StreamRng) -> Result<StatePoint> {
        self.heat_step(x, duration, rng)
    }

    fn heat_step(&self, x: &StatePoint, r: f64, rng: &mut StreamRng) -> Result<StatePoint> {
        if r < 0.0 {
            return Err(input(format!("negative duration {r}")));
        }
        if r == 0.0 {
            return Ok(*x);
        }
        let g: f64 = rng.sample(StandardNormal);
        Ok(StatePoint::Unit(reflect_unit(unit(x) + (2.0 * r).sqrt() * g)))
    }

    fn lipschitz(&self, mode: &EigenMode) -> Result<f64> {
        Ok(match mode.evaluator {
            Some(ModeFn::NeumannCos(k)) => SQRT_2 * PI * k as f64,
            _ => 0.0,
        })
    }

    fn ot_geometry(&self) -> OtGeometry {
        OtGeometry::Interval
    }

    fn sturm_liouville(&self) -> Option<SturmLiouville> {
        Some(SturmLiouville {
            lo: 0.0,
            hi: 1.0,
            p: Box::new(|_| 1.0),
            mass: Box::new(|a, b| b - a),
            boundary: Boundary::NoFlux,
        })
    }
}

/// Brownian motion on `(0,1)` conditioned never to hit the ends:
/// `L̂ = d²/dx² + 2π cot(πx) d/dx`, `μ(dx) = 2 sin²(πx) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConditionedInterval;

/// Guard band for the reflection near the singular ends.
pub const GUARD_BAND: f64 = 1e-6;

impl ConditionedInterval {
    pub fn cdf(x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        x - (2.0 * PI * x).sin() / (2.0 * PI)
    }

    fn drift(x: f64) -> f64 {
        2.0 * PI / (PI * x).tan()
    }
}

impl SpectralModel for ConditionedInterval {
    fn id(&self) -> &'static str {
        "interval-conditioned"
    }

    fn dims(&self) -> Dims {
        Dims { d: 3.0, d_prime: 1.0, d_dprime: 1.0 }
    }

    fn counting_bound(&self, lambda: f64) -> Option<f64> {
        // λ_i = π² i(i+2) ≥ π² i²
        Some(lambda.max(0.0).sqrt() / PI)
    }

    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>> {
        // θ_i = π²(i+1)² are the Dirichlet eigenvalues of d²/dx²; λ_i = θ_i − θ_0
        Ok((1..=n_modes)
            .map(|i| EigenMode {
                index: i,
                lambda: PI * PI * (((i + 1) * (i + 1)) as f64 - 1.0),
                multiplicity: 1,
                evaluator: Some(ModeFn::DirichletRatio(i as u32)),
            })
            .collect())
    }

    fn distance(&self, x: &StatePoint, y: &StatePoint) -> f64 {
        (unit(x) - unit(y)).abs()
    }

    fn contains(&self, x: &StatePoint) -> bool {
        matches!(*x, StatePoint::Unit(u) if u > 0.0 && u < 1.0)
    }

    fn invariant_quantile(&self, u: f64) -> Result<StatePoint> {
        check_level(u)?;
        Ok(StatePoint::Unit(bisect_quantile(Self::cdf, u)))
    }

    fn invariant_cdf(&self, x: f64) -> Result<f64> {
        Ok(Self::cdf(x))
    }

    fn invariant_density(&self, x: f64) -> Result<f64> {
        Ok(if (0.0..=1.0).contains(&x) { 2.0 * (PI * x).sin().powi(2) } else { 0.0 })
    }

    fn sample_invariant(&self, rng: &mut StreamRng) -> Result<StatePoint> {
        let u: f64 = rng.sample(rand_distr::Open01);
        let x = unit(&self.invariant_quantile(u)?);
        Ok(StatePoint::Unit(x.clamp(GUARD_BAND, 1.0 - GUARD_BAND)))
    }

    fn advance(&self, x: &StatePoint, duration: f64, ctl: &StepControl, rng: &mut StreamRng) -> Result<StatePoint> {
        if duration < 0.0 {
            return Err(input(format!("negative duration {duration}")));
        }
        let mut x = unit(x);
        if !(x > 0.0 && x < 1.0) {
            return Err(input(format!("conditioned interval state {x} outside (0,1)")));
        }
        if 3.0 * PI * PI * duration > ctl.relax_cutoff {
            return self.sample_invariant(rng);
        }
        let mut left = duration;
        while left > 0.0 {
            let edge = x * (1.0 - x);
            let h = left.min(ctl.h_max).min(edge * edge * ctl.h_scale);
            let g: f64 = rng.sample(StandardNormal);
            x += Self::drift(x) * h + (2.0 * h).sqrt() * g;
            if x < GUARD_BAND {
                x = 2.0 * GUARD_BAND - x;
            } else if x > 1.0 - GUARD_BAND {
                x = 2.0 * (1.0 - GUARD_BAND) - x;
            }
            x = x.clamp(GUARD_BAND, 1.0 - GUARD_BAND);
            left -= h;
        }
        Ok(StatePoint::Unit(x))
    }

    fn lipschitz(&self, mode: &EigenMode) -> Result<f64> {
        Ok(match mode.evaluator {
            Some(ModeFn::DirichletRatio(i)) => numeric_lipschitz_unit(|x| dirichlet_ratio(i, x), |_| 1.0),
            _ => 0.0,
        })
    }

    fn ot_geometry(&self) -> OtGeometry {
        OtGeometry::Interval
    }

    fn sturm_liouville(&self) -> Option<SturmLiouville> {
        let w = |x: f64| 2.0 * (PI * x).sin().powi(2);
        Some(SturmLiouville {
            lo: 0.0,
            hi: 1.0,
            p: Box::new(w),
            mass: Box::new(|a, b| Self::cdf(b) - Self::cdf(a)),
            boundary: Boundary::NoFlux,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_folds_into_unit_interval() {
        assert!((reflect_unit(1.25) - 0.75).abs() < 1e-15);
        assert!((reflect_unit(-0.25) - 0.25).abs() < 1e-15);
        assert!((reflect_unit(2.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditioned_median_is_half() {
        let x = ConditionedInterval.invariant_quantile(0.5).unwrap();
        assert!((x.scalar().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conditioned_quantile_is_monotone() {
        let mut last = -1.0;
        for j in 0..=100 {
            let x = ConditionedInterval.invariant_quantile(j as f64 / 100.0).unwrap().scalar().unwrap();
            assert!(x >= last);
            last = x;
        }
    }
}
