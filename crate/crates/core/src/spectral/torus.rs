use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    arc, set_multiplicities, wrap_angle, Dims, Drift, EigenMode, ModeFn, OtGeometry, SpectralModel, StatePoint,
    StepControl,
};
use crate::error::{capability, input, Result};
use crate::rng::StreamRng;

/// Flat torus `(ℝ/2πℤ)²` with `L = Δ + c₁∂₁ + c₂∂₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus2 {
    pub c: [f64; 2],
}

impl Torus2 {
    pub fn new(c: [f64; 2]) -> Self {
        Self { c }
    }

    /// Half-lattice frequencies `k ≠ 0` (one of `±k`), sorted by `|k|²`, then lexicographically.
    pub fn frequencies(max_norm_sq: i64) -> Vec<[i32; 2]> {
        let r = (max_norm_sq as f64).sqrt().ceil() as i32;
        let mut ks = Vec::new();
        for k1 in 0..=r {
            for k2 in -r..=r {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                let n = (k1 as i64).pow(2) + (k2 as i64).pow(2);
                if n <= max_norm_sq {
                    ks.push([k1, k2]);
                }
            }
        }
        ks.sort_by_key(|k| ((k[0] as i64).pow(2) + (k[1] as i64).pow(2), k[0], k[1]));
        ks
    }
}

fn pair(x: &StatePoint) -> [f64; 2] {
    match *x {
        StatePoint::Torus(p) => p,
        _ => panic!("torus state expected, got {x:?}"),
    }
}

impl SpectralModel for Torus2 {
    fn id(&self) -> &'static str {
        "torus2"
    }

    fn dims(&self) -> Dims {
        Dims { d: 2.0, d_prime: 2.0, d_dprime: 2.0 }
    }

    fn drift(&self) -> Drift {
        Drift::Torus(self.c)
    }

    fn counting_bound(&self, lambda: f64) -> Option<f64> {
        // unit squares around lattice points with |k|² ≤ Λ fit in a disc of radius √Λ + 1/√2
        Some(PI * (lambda.max(0.0).sqrt() + std::f64::consts::FRAC_1_SQRT_2).powi(2))
    }

    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>> {
        // the number of lattice points with |k|² ≤ R is about πR
        let mut radius_sq = ((n_modes as f64) / PI).ceil() as i64 + 4;
        loop {
            let ks = Torus2::frequencies(radius_sq);
            if 2 * ks.len() >= n_modes + 16 {
                // finish the last eigenvalue shell so the list is closed under the eigenspace
                let mut modes = Vec::with_capacity(2 * ks.len());
                for k in ks {
                    let lambda = (k[0] as f64).powi(2) + (k[1] as f64).powi(2);
                    for sine in [true, false] {
                        modes.push(EigenMode {
                            index: modes.len() + 1,
                            lambda,
                            multiplicity: 0,
                            evaluator: Some(ModeFn::TorusFourier { k, sine }),
                        });
                    }
                }
                modes.truncate(n_modes);
                set_multiplicities(&mut modes);
                return Ok(modes);
            }
            radius_sq *= 2;
        }
    }

    fn distance(&self, x: &StatePoint, y: &StatePoint) -> f64 {
        let (a, b) = (pair(x), pair(y));
        arc(a[0], b[0]).hypot(arc(a[1], b[1]))
    }

    fn contains(&self, x: &StatePoint) -> bool {
        matches!(*x, StatePoint::Torus(p) if p.iter().all(|v| (0.0..2.0 * PI).contains(v)))
    }

    fn invariant_quantile(&self, _u: f64) -> Result<StatePoint> {
        Err(capability("torus2: invariant law is not one-dimensional"))
    }

    fn sample_invariant(&self, rng: &mut StreamRng) -> Result<StatePoint> {
        Ok(StatePoint::Torus([2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()]))
    }

    fn advance(&self, x: &StatePoint, duration: f64, _ctl: &StepControl, rng: &mut StreamRng) -> Result<StatePoint> {
        if duration < 0.0 {
            return Err(input(format!("negative duration {duration}")));
        }
        if duration == 0.0 {
            return Ok(*x);
        }
        let p = pair(x);
        let s = (2.0 * duration).sqrt();
        let g0: f64 = rng.sample(StandardNormal);
        let g1: f64 = rng.sample(StandardNormal);
        Ok(StatePoint::Torus([
            wrap_angle(p[0] + self.c[0] * duration + s * g0),
            wrap_angle(p[1] + self.c[1] * duration + s * g1),
        ]))
    }

    fn heat_step(&self, x: &StatePoint, r: f64, rng: &mut StreamRng) -> Result<StatePoint> {
        Torus2::new([0.0, 0.0]).advance(x, r, &StepControl::default(), rng)
    }

    fn lipschitz(&self, mode: &EigenMode) -> Result<f64> {
        Ok(match mode.evaluator {
            Some(ModeFn::TorusFourier { k, .. }) => SQRT_2 * (k[0] as f64).hypot(k[1] as f64),
            _ => 0.0,
        })
    }

    fn ot_geometry(&self) -> OtGeometry {
        OtGeometry::Torus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_shells() {
        let modes = Torus2::new([0.0, 0.0]).eigen_data(12).unwrap();
        let lams: Vec<f64> = modes.iter().map(|m| m.lambda).collect();
        assert_eq!(&lams[..4], &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(&lams[4..8], &[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(&lams[8..12], &[4.0, 4.0, 4.0, 4.0]);
        assert_eq!(modes[0].multiplicity, 4);
    }
}
