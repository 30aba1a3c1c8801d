//! Empirical measures `μ_t^B`, spectral coefficients `ψ_i^B(t)`, the
//! diagnostic `Ξ^B(t)` and the heat-kernel regularization `μ_{t,r}^B`.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use serde::Serialize;

use crate::error::{capability, input, Result};
use crate::rng::StreamRng;
use crate::simulate::PathSample;
use crate::spectral::{EigenMode, ModeFn, SpectralModel, StatePoint};

/// Weighted atoms approximating `μ_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<StatePoint>,
    pub weights: Vec<f64>,
    pub horizon: f64,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<StatePoint>, weights: Vec<f64>, horizon: f64) -> Result<Self> {
        if atoms.len() != weights.len() || atoms.is_empty() {
            return Err(input(format!("{} atoms with {} weights", atoms.len(), weights.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(input("weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(input(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms, weights, horizon })
    }

    /// `μ(f) = Σ w_j f(x_j)`.
    pub fn integrate(&self, f: impl Fn(&StatePoint) -> f64) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Scalar coordinates paired with weights (one-dimensional models).
    pub fn scalar_atoms(&self) -> Result<Vec<(f64, f64)>> {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x.scalar().map(|s| (s, *w)).ok_or_else(|| capability("scalar atoms need a 1-D state")))
            .collect()
    }

    /// Each atom repeated `k` times at `1/k` of its weight.
    pub fn replicate(&self, k: usize) -> Self {
        let k = k.max(1);
        let atoms = self.atoms.iter().flat_map(|x| std::iter::repeat_n(*x, k)).collect();
        let weights = self.weights.iter().flat_map(|w| std::iter::repeat_n(w / k as f64, k)).collect();
        Self { atoms, weights, horizon: self.horizon }
    }

    /// `atom,weight` rows.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "atom,weight")?;
        for (x, w) in self.atoms.iter().zip(&self.weights) {
            writeln!(out, "{x},{w}")?;
        }
        Ok(())
    }
}

/// Trapezoid weights on the observation grid; consecutive equal states are merged.
pub fn empirical_from_path(path: &PathSample) -> Result<EmpiricalMeasure> {
    let n = path.states.len();
    if n < 2 {
        return Err(input("an empirical measure needs at least two observations"));
    }
    let m = (n - 1) as f64;
    let mut atoms: Vec<StatePoint> = Vec::with_capacity(n);
    let mut weights: Vec<f64> = Vec::with_capacity(n);
    for (j, x) in path.states.iter().enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 / m } else { 1.0 / m };
        match atoms.last() {
            Some(prev) if prev == x => *weights.last_mut().unwrap() += w,
            _ => {
                atoms.push(*x);
                weights.push(w);
            }
        }
    }
    Ok(EmpiricalMeasure { atoms, weights, horizon: path.horizon() })
}

/// Evaluates a fixed list of modes at one state, sharing trigonometric and
/// recurrence tables across modes.
pub struct ModeBank<'a> {
    modes: &'a [EigenMode],
    kmax: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    cos2: Vec<f64>,
    sin2: Vec<f64>,
    poly: Vec<f64>,
}

impl<'a> ModeBank<'a> {
    pub fn new(modes: &'a [EigenMode]) -> Result<Self> {
        let mut kmax = 0usize;
        for m in modes {
            let k = match &m.evaluator {
                None => return Err(capability(format!("mode {} has no evaluator", m.index))),
                Some(ModeFn::Constant) => 0,
                Some(ModeFn::CircleCos(k) | ModeFn::CircleSin(k) | ModeFn::NeumannCos(k)) => *k as usize,
                Some(ModeFn::DirichletRatio(i)) => *i as usize,
                Some(ModeFn::Jacobi { degree, .. }) => *degree as usize,
                Some(ModeFn::TorusFourier { k, .. }) => k[0].unsigned_abs().max(k[1].unsigned_abs()) as usize,
            };
            kmax = kmax.max(k);
        }
        let z = vec![0.0; kmax + 1];
        Ok(Self { modes, kmax, cos: z.clone(), sin: z.clone(), cos2: z.clone(), sin2: z.clone(), poly: z })
    }

    fn trig(kmax: usize, x: f64, cos: &mut [f64], sin: &mut [f64]) {
        let (s1, c1) = x.sin_cos();
        cos[0] = 1.0;
        sin[0] = 0.0;
        for k in 1..=kmax {
            // rotation by x; error grows only linearly in k
            cos[k] = cos[k - 1] * c1 - sin[k - 1] * s1;
            sin[k] = sin[k - 1] * c1 + cos[k - 1] * s1;
        }
    }

    /// `out[i] = φ_i(x)` for every mode.
    pub fn eval(&mut self, x: &StatePoint, out: &mut Vec<f64>) {
        out.clear();
        let k = self.kmax;
        match *x {
            StatePoint::Angle(a) => Self::trig(k, a, &mut self.cos, &mut self.sin),
            StatePoint::Torus([a, b]) => {
                Self::trig(k, a, &mut self.cos, &mut self.sin);
                Self::trig(k, b, &mut self.cos2, &mut self.sin2);
            }
            StatePoint::Unit(u) => {
                let kind = self.modes.first().and_then(|m| m.evaluator.as_ref());
                match kind {
                    Some(ModeFn::NeumannCos(_)) => Self::trig(k, PI * u, &mut self.cos, &mut self.sin),
                    Some(ModeFn::DirichletRatio(_)) => {
                        let c = (PI * u).cos();
                        self.poly[0] = 1.0;
                        if k >= 1 {
                            self.poly[1] = 2.0 * c;
                        }
                        for j in 2..=k {
                            self.poly[j] = 2.0 * c * self.poly[j - 1] - self.poly[j - 2];
                        }
                    }
                    Some(ModeFn::Jacobi { recurrence, .. }) => {
                        let mut buf = std::mem::take(&mut self.poly);
                        recurrence.eval_all(u, k, &mut buf);
                        self.poly = buf;
                    }
                    _ => {}
                }
            }
        }
        for m in self.modes {
            let v = match (m.evaluator.as_ref().unwrap(), x) {
                (ModeFn::Constant, _) => 1.0,
                (ModeFn::CircleCos(k), StatePoint::Angle(_)) => SQRT_2 * self.cos[*k as usize],
                (ModeFn::CircleSin(k), StatePoint::Angle(_)) => SQRT_2 * self.sin[*k as usize],
                (ModeFn::NeumannCos(k), StatePoint::Unit(_)) => SQRT_2 * self.cos[*k as usize],
                (ModeFn::DirichletRatio(i), StatePoint::Unit(_)) => self.poly[*i as usize],
                (ModeFn::Jacobi { degree, .. }, StatePoint::Unit(_)) => self.poly[*degree as usize],
                (ModeFn::TorusFourier { k, sine }, StatePoint::Torus(_)) => {
                    let (c1, s1) = (self.cos[k[0].unsigned_abs() as usize], self.sin[k[0].unsigned_abs() as usize]);
                    let s1 = s1 * k[0].signum() as f64;
                    let (c2, s2) = (self.cos2[k[1].unsigned_abs() as usize], self.sin2[k[1].unsigned_abs() as usize]);
                    let s2 = s2 * k[1].signum() as f64;
                    if *sine {
                        SQRT_2 * (s1 * c2 + c1 * s2)
                    } else {
                        SQRT_2 * (c1 * c2 - s1 * s2)
                    }
                }
                (f, x) => f.eval(x),
            };
            out.push(v);
        }
    }
}

/// `ψ_1, …, ψ_N` with their eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCoefficients {
    pub horizon: f64,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectralCoefficients {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `i,lambda,psi` rows.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "i,lambda,psi")?;
        for (i, (l, p)) in self.lambdas.iter().zip(&self.values).enumerate() {
            writeln!(out, "{},{l},{p}", i + 1)?;
        }
        Ok(())
    }
}

/// `ψ_i = √t · μ_t(φ_i)`, the trapezoid form of `t^{-1/2} ∫_0^t φ_i(X_s) ds`.
pub fn psi_from_measure(measure: &EmpiricalMeasure, modes: &[EigenMode]) -> Result<SpectralCoefficients> {
    if modes.is_empty() {
        return Err(input("need at least one mode"));
    }
    let mut bank = ModeBank::new(modes)?;
    let mut acc = vec![0.0; modes.len()];
    let mut buf = Vec::with_capacity(modes.len());
    for (x, w) in measure.atoms.iter().zip(&measure.weights) {
        bank.eval(x, &mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += w * v;
        }
    }
    let s = measure.horizon.sqrt();
    Ok(SpectralCoefficients {
        horizon: measure.horizon,
        lambdas: modes.iter().map(|m| m.lambda).collect(),
        values: acc.into_iter().map(|a| a * s).collect(),
    })
}

pub fn psi(path: &PathSample, modes: &[EigenMode], n: usize) -> Result<SpectralCoefficients> {
    if n == 0 || n > modes.len() {
        return Err(input(format!("truncation {n} outside 1..={}", modes.len())));
    }
    psi_from_measure(&empirical_from_path(path)?, &modes[..n])
}

/// `Ξ = Σ_{i≤N} ψ_i²/λ_i`.
pub fn xi(coeffs: &SpectralCoefficients) -> f64 {
    coeffs.values.iter().zip(&coeffs.lambdas).map(|(p, l)| p * p / l).sum()
}

/// `Ξ` together with the a-priori bound on the expected truncated tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiEstimate {
    pub value: f64,
    pub n: usize,
    pub tail_bound: f64,
}

pub fn xi_with_tail(coeffs: &SpectralCoefficients, tail_bound: f64) -> XiEstimate {
    XiEstimate { value: xi(coeffs), n: coeffs.n(), tail_bound }
}

/// Coefficients of `f_{t,r} − 1`: `e^{−λ_i r} ψ_i / √t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothedDensity {
    pub horizon: f64,
    pub r: f64,
    pub lambdas: Vec<f64>,
    pub coefficients: Vec<f64>,
    psi: Vec<f64>,
}

impl SmoothedDensity {
    /// `Ξ_r = Σ e^{−2λ_i r} ψ_i²/λ_i`.
    pub fn xi_r(&self) -> f64 {
        self.psi.iter().zip(&self.lambdas).map(|(p, l)| (-2.0 * l * self.r).exp() * p * p / l).sum()
    }

    /// `f_{t,r}(x)` from the truncated expansion.
    pub fn density(&self, modes: &[EigenMode], x: &StatePoint) -> Result<f64> {
        let mut bank = ModeBank::new(&modes[..self.coefficients.len()])?;
        let mut buf = Vec::new();
        bank.eval(x, &mut buf);
        Ok(1.0 + self.coefficients.iter().zip(&buf).map(|(c, v)| c * v).sum::<f64>())
    }
}

/// Cell masses of a smoothed circle density, as atoms at the arc midpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleCells {
    pub measure: EmpiricalMeasure,
    /// Largest in-cell displacement `π/cells`, so `|W_p(f) − W_p(measure)| ≤ displacement`.
    pub displacement: f64,
    /// Negative mass clipped to zero before renormalizing.
    pub clipped: f64,
}

impl SmoothedDensity {
    /// Exact integrals of the truncated expansion over `cells` equal arcs.
    /// Cells whose mass falls below `−tolerance` are an error; milder
    /// negatives (truncation ripple) are clipped and reported.
    pub fn circle_cells(&self, modes: &[EigenMode], cells: usize, tolerance: f64) -> Result<CircleCells> {
        if cells == 0 {
            return Err(input("need at least one cell"));
        }
        let h = 2.0 * PI / cells as f64;
        let mut mass = vec![1.0 / cells as f64; cells];
        for (c, mode) in self.coefficients.iter().zip(modes) {
            let (k, cosine) = match mode.evaluator {
                Some(ModeFn::CircleCos(k)) => (k as f64, true),
                Some(ModeFn::CircleSin(k)) => (k as f64, false),
                _ => return Err(capability("cell masses need circle Fourier modes")),
            };
            // ∫_a^b √2 cos(kx) dx/2π and ∫_a^b √2 sin(kx) dx/2π
            let prim = |x: f64| if cosine { (k * x).sin() } else { -(k * x).cos() } * SQRT_2 / (2.0 * PI * k);
            for (j, m) in mass.iter_mut().enumerate() {
                *m += c * (prim((j + 1) as f64 * h) - prim(j as f64 * h));
            }
        }
        if mass.iter().any(|m| *m < -tolerance - 1e-15) {
            return Err(input("truncated smoothed density is negative; raise r or the truncation"));
        }
        let clipped: f64 = mass.iter().filter(|m| **m < 0.0).map(|m| -m).sum();
        let total: f64 = mass.iter().map(|m| m.max(0.0)).sum();
        let weights = mass.iter().map(|m| m.max(0.0) / total).collect();
        let atoms = (0..cells).map(|j| StatePoint::Angle((j as f64 + 0.5) * h)).collect();
        Ok(CircleCells {
            measure: EmpiricalMeasure::new(atoms, weights, self.horizon)?,
            displacement: PI / cells as f64,
            clipped,
        })
    }
}

pub fn smooth(coeffs: &SpectralCoefficients, r: f64) -> Result<SmoothedDensity> {
    if !(r > 0.0) {
        return Err(input(format!("bandwidth r={r} must be positive")));
    }
    let s = coeffs.horizon.sqrt();
    let coefficients: Vec<f64> =
        coeffs.values.iter().zip(&coeffs.lambdas).map(|(p, l)| (-l * r).exp() * p / s).collect();
    Ok(SmoothedDensity {
        horizon: coeffs.horizon,
        r,
        lambdas: coeffs.lambdas.clone(),
        coefficients,
        psi: coeffs.values.clone(),
    })
}

/// `μ_t P̂_r`: every atom moved by one exact symmetric heat-kernel draw.
pub fn smoothed_pushforward(
    measure: &EmpiricalMeasure,
    r: f64,
    model: &dyn SpectralModel,
    rng: &mut StreamRng,
) -> Result<EmpiricalMeasure> {
    if r < 0.0 {
        return Err(input(format!("bandwidth r={r} must be non-negative")));
    }
    let atoms = measure.atoms.iter().map(|x| model.heat_step(x, r, rng)).collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalMeasure { atoms, weights: measure.weights.clone(), horizon: measure.horizon })
}
