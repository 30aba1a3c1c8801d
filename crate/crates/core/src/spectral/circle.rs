use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    arc, wrap_angle, Boundary, Dims, Drift, EigenMode, ModeFn, OtGeometry, SpectralModel, StatePoint, StepControl,
    SturmLiouville,
};
use crate::error::{input, Result};
use crate::rng::StreamRng;

/// `ℝ/2πℤ` with `L = d²/dx² + c d/dx`; `μ` is uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub c: f64,
}

impl Circle {
    pub fn new(c: f64) -> Self {
        Self { c }
    }

    /// Frequency of the `index`-th non-trivial mode (1-based).
    pub fn frequency(index: usize) -> u32 {
        index.div_ceil(2) as u32
    }
}

fn angle(x: &StatePoint) -> f64 {
    match *x {
        StatePoint::Angle(a) => a,
        _ => panic!("circle state expected, got {x:?}"),
    }
}

impl SpectralModel for Circle {
    fn id(&self) -> &'static str {
        "circle"
    }

    fn dims(&self) -> Dims {
        Dims { d: 1.0, d_prime: 1.0, d_dprime: 1.0 }
    }

    fn drift(&self) -> Drift {
        Drift::Circle(self.c)
    }

    fn counting_bound(&self, lambda: f64) -> Option<f64> {
        Some(2.0 * lambda.max(0.0).sqrt())
    }

    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>> {
        let modes: Vec<EigenMode> = (1..=n_modes)
            .map(|i| {
                let k = Self::frequency(i);
                let evaluator = if i % 2 == 1 { ModeFn::CircleSin(k) } else { ModeFn::CircleCos(k) };
                EigenMode { index: i, lambda: (k as f64).powi(2), multiplicity: 2, evaluator: Some(evaluator) }
            })
            .collect();
        Ok(modes)
    }

    fn distance(&self, x: &StatePoint, y: &StatePoint) -> f64 {
        arc(angle(x), angle(y))
    }

    fn contains(&self, x: &StatePoint) -> bool {
        matches!(*x, StatePoint::Angle(a) if (0.0..2.0 * PI).contains(&a))
    }

    fn invariant_quantile(&self, u: f64) -> Result<StatePoint> {
        if !(0.0..=1.0).contains(&u) {
            return Err(input(format!("quantile level {u} outside [0,1]")));
        }
        Ok(StatePoint::Angle(if u >= 1.0 { 0.0 } else { 2.0 * PI * u }))
    }

    fn sample_invariant(&self, rng: &mut StreamRng) -> Result<StatePoint> {
        self.invariant_quantile(rng.random::<f64>())
    }

    fn advance(&self, x: &StatePoint, duration: f64, _ctl: &StepControl, rng: &mut StreamRng) -> Result<StatePoint> {
        if duration < 0.0 {
            return Err(input(format!("negative duration {duration}")));
        }
        if duration == 0.0 {
            return Ok(*x);
        }
        let g: f64 = rng.sample(StandardNormal);
        Ok(StatePoint::Angle(wrap_angle(angle(x) + self.c * duration + (2.0 * duration).sqrt() * g)))
    }

    fn heat_step(&self, x: &StatePoint, r: f64, rng: &mut StreamRng) -> Result<StatePoint> {
        if r == 0.0 {
            return Ok(*x);
        }
        let g: f64 = rng.sample(StandardNormal);
        Ok(StatePoint::Angle(wrap_angle(angle(x) + (2.0 * r).sqrt() * g)))
    }

    fn lipschitz(&self, mode: &EigenMode) -> Result<f64> {
        Ok(match mode.evaluator {
            Some(ModeFn::CircleCos(k)) | Some(ModeFn::CircleSin(k)) => SQRT_2 * k as f64,
            _ => 0.0,
        })
    }

    fn ot_geometry(&self) -> OtGeometry {
        OtGeometry::Circle
    }

    fn sturm_liouville(&self) -> Option<SturmLiouville> {
        Some(SturmLiouville {
            lo: 0.0,
            hi: 2.0 * PI,
            p: Box::new(|_| 1.0 / (2.0 * PI)),
            mass: Box::new(|a, b| (b - a) / (2.0 * PI)),
            boundary: Boundary::PeriodicSymmetric,
        })
    }
}
