use std::f64::consts::SQRT_2;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::beta::{beta_reg, ln_beta};

use super::interval::bisect_quantile;
use super::{
    numeric_lipschitz_unit, Boundary, Dims, EigenMode, JacobiRecurrence, ModeFn, OtGeometry, SpectralModel, StatePoint,
    StepControl, SturmLiouville,
};
use crate::error::{input, parameter, Result};
use crate::rng::StreamRng;

/// Wright–Fisher diffusion `L̂ = ½x(1−x) d²/dx² + (a − (a+b)x) d/dx` on `[0,1]`,
/// reversible for `Beta(2a, 2b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WrightFisher {
    a: f64,
    b: f64,
    law: EigenLaw,
}

/// Which closed form supplies `λ_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenLaw {
    /// `i(i−1)/2 + (a+b)i`.
    #[default]
    Quadratic,
    /// `(a+b)i`.
    Linear,
}

impl WrightFisher {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.25 && b > 0.25) || !a.is_finite() || !b.is_finite() {
            return Err(parameter(format!("Wright-Fisher needs a, b > 1/4 (got a={a}, b={b})")));
        }
        Ok(Self { a, b, law: EigenLaw::Quadratic })
    }

    pub fn with_law(mut self, law: EigenLaw) -> Self {
        self.law = law;
        self
    }

    pub fn law(&self) -> EigenLaw {
        self.law
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `λ_i` under the configured law.
    pub fn lambda(&self, i: usize) -> f64 {
        match self.law {
            EigenLaw::Quadratic => self.eigenvalue(i),
            EigenLaw::Linear => self.linear_eigenvalue(i),
        }
    }

    /// `λ_i = i(i−1)/2 + (a+b)i`, the coefficient of `x^i` in `−L̂ x^i`.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        let i = i as f64;
        0.5 * i * (i - 1.0) + (self.a + self.b) * i
    }

    /// The linear law `λ_i = (a+b)i` obtained when the second-order term is dropped.
    pub fn linear_eigenvalue(&self, i: usize) -> f64 {
        (self.a + self.b) * i as f64
    }

    /// Shape parameters of the invariant Beta law.
    pub fn beta_shape(&self) -> (f64, f64) {
        (2.0 * self.a, 2.0 * self.b)
    }

    /// Orthonormal recurrence for `Beta(2a, 2b)` up to degree `n`, from the
    /// monic Jacobi recurrence on `[−1,1]` mapped by `x = (1+y)/2`.
    pub fn recurrence(&self, n: usize) -> JacobiRecurrence {
        let (al, be) = (2.0 * self.b - 1.0, 2.0 * self.a - 1.0);
        let s = al + be;
        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 2);
        b.push(1.0);
        for k in 0..=n {
            let kf = k as f64;
            let ay = if k == 0 {
                (be - al) / (s + 2.0)
            } else {
                (be * be - al * al) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
            };
            a.push(0.5 * (1.0 + ay));
            let k1 = kf + 1.0;
            let t = 2.0 * k1 + s;
            let by = 4.0 * k1 * (k1 + al) * (k1 + be) * (k1 + s) / (t * t * (t + 1.0) * (t - 1.0));
            b.push(0.25 * by);
        }
        JacobiRecurrence { a, b }
    }

    pub fn density(&self, x: f64) -> f64 {
        let (p, q) = self.beta_shape();
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        ((p - 1.0) * x.ln() + (q - 1.0) * (1.0 - x).ln() - ln_beta(p, q)).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        let (p, q) = self.beta_shape();
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            beta_reg(p, q, x)
        }
    }
}

fn unit(x: &StatePoint) -> f64 {
    match *x {
        StatePoint::Unit(u) => u,
        _ => panic!("interval state expected, got {x:?}"),
    }
}

/// `g(x) = 2√2 arcsin √x`, so that `ρ(x,y) = |g(x) − g(y)|`.
pub fn wright_fisher_metric(x: f64) -> f64 {
    2.0 * SQRT_2 * x.clamp(0.0, 1.0).sqrt().asin()
}

impl SpectralModel for WrightFisher {
    fn id(&self) -> &'static str {
        "wright-fisher"
    }

    fn dims(&self) -> Dims {
        Dims { d: 4.0 * self.a.max(self.b), d_prime: 2.0, d_dprime: 2.0 }
    }

    fn counting_bound(&self, lambda: f64) -> Option<f64> {
        let lambda = lambda.max(0.0);
        Some(match self.law {
            // i(i−1)/2 + (a+b)i ≥ i²/2 because a + b > 1/2
            EigenLaw::Quadratic => (2.0 * lambda).sqrt(),
            EigenLaw::Linear => lambda / (self.a + self.b),
        })
    }

    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>> {
        let rec = Arc::new(self.recurrence(n_modes));
        Ok((1..=n_modes)
            .map(|i| EigenMode {
                index: i,
                lambda: self.lambda(i),
                multiplicity: 1,
                evaluator: Some(ModeFn::Jacobi { degree: i as u32, recurrence: Arc::clone(&rec) }),
            })
            .collect())
    }

    fn distance(&self, x: &StatePoint, y: &StatePoint) -> f64 {
        (wright_fisher_metric(unit(x)) - wright_fisher_metric(unit(y))).abs()
    }

    fn contains(&self, x: &StatePoint) -> bool {
        matches!(*x, StatePoint::Unit(u) if (0.0..=1.0).contains(&u))
    }

    fn invariant_quantile(&self, u: f64) -> Result<StatePoint> {
        if !(0.0..=1.0).contains(&u) {
            return Err(input(format!("quantile level {u} outside [0,1]")));
        }
        let (p, q) = self.beta_shape();
        if p == 1.0 && q == 1.0 {
            return Ok(StatePoint::Unit(u));
        }
        Ok(StatePoint::Unit(bisect_quantile(|x| self.cdf(x), u)))
    }

    fn invariant_cdf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf(x))
    }

    fn invariant_density(&self, x: f64) -> Result<f64> {
        Ok(self.density(x))
    }

    fn sample_invariant(&self, rng: &mut StreamRng) -> Result<StatePoint> {
        self.invariant_quantile(rng.sample(rand_distr::Open01))
    }

    fn advance(&self, x: &StatePoint, duration: f64, ctl: &StepControl, rng: &mut StreamRng) -> Result<StatePoint> {
        if duration < 0.0 {
            return Err(input(format!("negative duration {duration}")));
        }
        let mut x = unit(x);
        if !(0.0..=1.0).contains(&x) {
            return Err(input(format!("Wright-Fisher state {x} outside [0,1]")));
        }
        if self.lambda(1) * duration > ctl.relax_cutoff {
            return self.sample_invariant(rng);
        }
        let mut left = duration;
        while left > 0.0 {
            let h = left.min(ctl.h_max);
            let g: f64 = rng.sample(StandardNormal);
            let drift = self.a - (self.a + self.b) * x;
            x = (x + drift * h + (x * (1.0 - x) * h).sqrt() * g).clamp(0.0, 1.0);
            left -= h;
        }
        Ok(StatePoint::Unit(x))
    }

    fn lipschitz(&self, mode: &EigenMode) -> Result<f64> {
        Ok(match &mode.evaluator {
            Some(ModeFn::Jacobi { degree, recurrence }) => {
                numeric_lipschitz_unit(|x| recurrence.eval(x, *degree as usize), |x| (0.5 * x * (1.0 - x)).sqrt())
            }
            _ => 0.0,
        })
    }

    fn metric_transform(&self, x: f64) -> f64 {
        wright_fisher_metric(x)
    }

    fn ot_geometry(&self) -> OtGeometry {
        OtGeometry::Interval
    }

    fn sturm_liouville(&self) -> Option<SturmLiouville> {
        let (p, q) = self.beta_shape();
        let lb = ln_beta(p, q);
        let me = self.clone();
        Some(SturmLiouville {
            lo: 0.0,
            hi: 1.0,
            p: Box::new(
                move |x| {
                    if x <= 0.0 || x >= 1.0 {
                        0.0
                    } else {
                        0.5 * (p * x.ln() + q * (1.0 - x).ln() - lb).exp()
                    }
                },
            ),
            mass: Box::new(move |x0, x1| me.cdf(x1) - me.cdf(x0)),
            boundary: Boundary::NoFlux,
        })
    }
}
