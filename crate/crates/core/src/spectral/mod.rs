//! Model catalog: eigen-data, invariant law, intrinsic distance and the
//! diffusion kernel for every concrete state space.
//!
//! Each model implements [`SpectralModel`]; the [`registry`] resolves a
//! string id plus numeric parameters into an `Arc<dyn SpectralModel>`.

mod circle;
pub mod fd_oracle;
mod interval;
pub mod registry;
mod su2;
mod torus;
mod wright_fisher;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{capability, Result};
use crate::rng::StreamRng;

pub use circle::Circle;
pub use fd_oracle::{eigen_oracle_fd, resolve_wright_fisher_spectrum, SpectrumResolution};
pub use interval::{ConditionedInterval, IntervalNeumann};
pub use registry::{ModelParams, ModelRegistry, WF_RESOLUTION_GRIDS};
pub use su2::Su2Spectrum;
pub use torus::Torus2;
pub use wright_fisher::{wright_fisher_metric, EigenLaw, WrightFisher};

/// A point of the state space, tagged by coordinate type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StatePoint {
    /// Angle in `[0, 2π)`.
    Angle(f64),
    /// Two angles in `[0, 2π)²`.
    Torus([f64; 2]),
    /// Coordinate in `[0, 1]`.
    Unit(f64),
}

impl StatePoint {
    /// Scalar coordinate of a one-dimensional state.
    pub fn scalar(&self) -> Option<f64> {
        match *self {
            StatePoint::Angle(x) | StatePoint::Unit(x) => Some(x),
            StatePoint::Torus(_) => None,
        }
    }
}

impl fmt::Display for StatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePoint::Angle(x) | StatePoint::Unit(x) => write!(f, "{x}"),
            StatePoint::Torus([x, y]) => write!(f, "{x};{y}"),
        }
    }
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2π
    if y >= 2.0 * PI {
        0.0
    } else {
        y
    }
}

pub(crate) fn arc(x: f64, y: f64) -> f64 {
    let d = (x - y).abs().rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Heat-kernel, eigenvalue-growth and volume-growth dimensions `(d, d′, d″)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dims {
    pub d: f64,
    pub d_prime: f64,
    pub d_dprime: f64,
}

/// Divergence-free drift carried by a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Drift {
    None,
    Circle(f64),
    Torus([f64; 2]),
}

impl Drift {
    pub fn is_zero(&self) -> bool {
        match *self {
            Drift::None => true,
            Drift::Circle(c) => c == 0.0,
            Drift::Torus([a, b]) => a == 0.0 && b == 0.0,
        }
    }

    /// Euclidean size of the constant field.
    pub fn magnitude(&self) -> f64 {
        match *self {
            Drift::None => 0.0,
            Drift::Circle(c) => c.abs(),
            Drift::Torus([a, b]) => a.hypot(b),
        }
    }
}

/// Closed-form eigenfunction, orthonormal in `L²(μ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeFn {
    Constant,
    /// `√2 cos(kx)` on the circle.
    CircleCos(u32),
    /// `√2 sin(kx)` on the circle.
    CircleSin(u32),
    /// `√2 cos(k·x)` or `√2 sin(k·x)` on the flat 2-torus.
    TorusFourier {
        k: [i32; 2],
        sine: bool,
    },
    /// `√2 cos(kπx)` on `[0,1]`.
    NeumannCos(u32),
    /// `sin((i+1)πx) / sin(πx)`, the ratio `h_i / h_0` of Dirichlet modes.
    DirichletRatio(u32),
    /// Degree-`degree` orthonormal polynomial for a Beta weight.
    Jacobi {
        degree: u32,
        recurrence: std::sync::Arc<JacobiRecurrence>,
    },
}

/// Orthonormal three-term recurrence `√b_{k+1} φ_{k+1} = (x − a_k) φ_k − √b_k φ_{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRecurrence {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl JacobiRecurrence {
    /// Values `φ_0(x), …, φ_n(x)`.
    pub fn eval_all(&self, x: f64, n: usize, out: &mut Vec<f64>) {
        out.clear();
        out.push(1.0);
        if n == 0 {
            return;
        }
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 0..n {
            let sb_k = if k == 0 { 0.0 } else { self.b[k].sqrt() };
            let next = ((x - self.a[k]) * cur - sb_k * prev) / self.b[k + 1].sqrt();
            prev = cur;
            cur = next;
            out.push(cur);
        }
    }

    pub fn eval(&self, x: f64, degree: usize) -> f64 {
        let mut buf = Vec::with_capacity(degree + 1);
        self.eval_all(x, degree, &mut buf);
        buf[degree]
    }
}

/// `U_i(cos θ) = sin((i+1)θ)/sin θ`, by the Chebyshev recurrence so that
/// the endpoints are finite (`U_i(±1) = (±1)^i (i+1)`).
pub(crate) fn dirichlet_ratio(i: u32, x: f64) -> f64 {
    let c = (PI * x).cos();
    let (mut u0, mut u1) = (1.0, 2.0 * c);
    if i == 0 {
        return 1.0;
    }
    for _ in 1..i {
        let u2 = 2.0 * c * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

impl ModeFn {
    pub fn eval(&self, x: &StatePoint) -> f64 {
        let s2 = std::f64::consts::SQRT_2;
        match (self, x) {
            (ModeFn::Constant, _) => 1.0,
            (ModeFn::CircleCos(k), StatePoint::Angle(a)) => s2 * (*k as f64 * a).cos(),
            (ModeFn::CircleSin(k), StatePoint::Angle(a)) => s2 * (*k as f64 * a).sin(),
            (ModeFn::TorusFourier { k, sine }, StatePoint::Torus(p)) => {
                let arg = k[0] as f64 * p[0] + k[1] as f64 * p[1];
                if *sine {
                    s2 * arg.sin()
                } else {
                    s2 * arg.cos()
                }
            }
            (ModeFn::NeumannCos(k), StatePoint::Unit(u)) => s2 * (*k as f64 * PI * u).cos(),
            (ModeFn::DirichletRatio(i), StatePoint::Unit(u)) => dirichlet_ratio(*i, *u),
            (ModeFn::Jacobi { degree, recurrence }, StatePoint::Unit(u)) => recurrence.eval(*u, *degree as usize),
            _ => panic!("mode {self:?} evaluated at incompatible state {x:?}"),
        }
    }
}

/// One eigenpair `(λ_i, φ_i)` of the symmetric part `−L̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenMode {
    pub index: usize,
    pub lambda: f64,
    /// Number of listed modes sharing this eigenvalue.
    pub multiplicity: u32,
    /// `None` for spectrum-only models.
    pub evaluator: Option<ModeFn>,
}

impl EigenMode {
    pub fn eval(&self, x: &StatePoint) -> Option<f64> {
        self.evaluator.as_ref().map(|f| f.eval(x))
    }
}

/// Fill in `multiplicity` from runs of equal eigenvalues.
pub(crate) fn set_multiplicities(modes: &mut [EigenMode]) {
    let mut start = 0;
    while start < modes.len() {
        let lam = modes[start].lambda;
        let mut end = start + 1;
        while end < modes.len() && (modes[end].lambda - lam).abs() <= 1e-12 * lam.max(1.0) {
            end += 1;
        }
        for m in &mut modes[start..end] {
            m.multiplicity = (end - start) as u32;
        }
        start = end;
    }
}

/// Per-step control for Euler-type kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Largest internal substep in process time.
    pub h_max: f64,
    /// Local substep scale near a singular boundary, `h ≤ (x(1−x))²·h_scale`.
    pub h_scale: f64,
    /// Durations with `λ_1·duration` above this are replaced by a fresh draw
    /// from `μ` (the kernel is then within `e^{−relax_cutoff}` of `μ`).
    pub relax_cutoff: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { h_max: 1e-3, h_scale: 0.05, relax_cutoff: 40.0 }
    }
}

/// How Wasserstein distances to `μ` are computed for a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OtGeometry {
    /// Arc length on the circle of circumference `2π`, uniform target.
    Circle,
    /// `ρ(x,y) = |g(x) − g(y)|` on `[0,1]` with the model's monotone `g`.
    Interval,
    /// Flat 2-torus; only entropic grid solves are available.
    Torus,
    /// No transport support.
    Unsupported,
}

/// Sturm–Liouville form `L̂f = w⁻¹ (p f′)′` of a one-dimensional generator,
/// used by the finite-difference oracle.
pub struct SturmLiouville {
    pub lo: f64,
    pub hi: f64,
    /// Flux coefficient `p(x)`.
    pub p: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `∫_x0^x1 w(x) dx` for the normalized invariant density `w`.
    pub mass: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Zero flux at both ends (Neumann, or `p` vanishing at the ends).
    NoFlux,
    /// Periodic with coefficients symmetric under `x ↦ lo + hi − x`.
    PeriodicSymmetric,
}

/// A concrete state space and generator.
pub trait SpectralModel: Send + Sync + fmt::Debug {
    /// Catalog id.
    fn id(&self) -> &'static str;

    fn dims(&self) -> Dims;

    fn drift(&self) -> Drift {
        Drift::None
    }

    /// First `n_modes` non-trivial eigenmodes (`λ_1 ≤ λ_2 ≤ …`, `φ_0 ≡ 1` excluded).
    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>>;

    /// Upper bound on `#{i ≥ 1 : λ_i ≤ lambda}`, used for spectral tail sums.
    fn counting_bound(&self, _lambda: f64) -> Option<f64> {
        None
    }

    /// Intrinsic distance.
    fn distance(&self, x: &StatePoint, y: &StatePoint) -> f64;

    fn contains(&self, x: &StatePoint) -> bool;

    /// Quantile map of `μ` for one-dimensional models.
    fn invariant_quantile(&self, u: f64) -> Result<StatePoint>;

    /// Cumulative distribution of `μ` for interval models.
    fn invariant_cdf(&self, _x: f64) -> Result<f64> {
        Err(capability(format!("{}: no scalar CDF", self.id())))
    }

    /// Density of `μ` on `[0,1]` for interval models.
    fn invariant_density(&self, _x: f64) -> Result<f64> {
        Err(capability(format!("{}: no scalar density", self.id())))
    }

    fn sample_invariant(&self, rng: &mut StreamRng) -> Result<StatePoint>;

    /// Run the (non-symmetric) diffusion for `duration` units of process time.
    fn advance(&self, x: &StatePoint, duration: f64, ctl: &StepControl, rng: &mut StreamRng) -> Result<StatePoint>;

    /// One exact draw from the symmetric heat kernel `P̂_r(x, ·)`.
    fn heat_step(&self, _x: &StatePoint, _r: f64, _rng: &mut StreamRng) -> Result<StatePoint> {
        Err(capability(format!("{}: no exact symmetric heat-kernel step", self.id())))
    }

    /// Sup of `|∇φ|` in the intrinsic metric.
    fn lipschitz(&self, mode: &EigenMode) -> Result<f64>;

    /// Monotone reparametrization `g` with `ρ(x,y) = |g(x) − g(y)|` (interval models).
    fn metric_transform(&self, x: f64) -> f64 {
        x
    }

    fn ot_geometry(&self) -> OtGeometry;

    /// Symmetric part in Sturm–Liouville form (one-dimensional models).
    fn sturm_liouville(&self) -> Option<SturmLiouville> {
        None
    }

    /// Whether [`SpectralModel::advance`] is available.
    fn can_simulate(&self) -> bool {
        true
    }
}

/// Numerical sup of `scale(x)·|φ′(x)|` over a fine grid of `[0,1]`.
pub(crate) fn numeric_lipschitz_unit(f: impl Fn(f64) -> f64, scale: impl Fn(f64) -> f64) -> f64 {
    let n = 20_000;
    let h = 1.0 / n as f64;
    (0..n)
        .map(|j| {
            let x0 = j as f64 * h;
            let x1 = x0 + h;
            let slope = (f(x1) - f(x0)).abs() / h;
            slope * scale(x0).max(scale(x1))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_ratio_matches_direct_quotient() {
        for i in 0..8u32 {
            for &x in &[0.1, 0.3, 0.5, 0.77] {
                let direct = ((i + 1) as f64 * PI * x).sin() / (PI * x).sin();
                assert!((dirichlet_ratio(i, x) - direct).abs() < 1e-12);
            }
            // finite limits at the ends
            assert!((dirichlet_ratio(i, 0.0) - (i + 1) as f64).abs() < 1e-12);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((dirichlet_ratio(i, 1.0) - sign * (i + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn wrap_and_arc() {
        assert!((wrap_angle(-0.5) - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert_eq!(wrap_angle(2.0 * PI), 0.0);
        assert!((arc(0.1, 2.0 * PI - 0.1) - 0.2).abs() < 1e-12);
        assert!((arc(0.0, PI) - PI).abs() < 1e-15);
    }
}
