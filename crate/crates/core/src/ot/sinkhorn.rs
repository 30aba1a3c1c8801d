//! Debiased entropic transport on an `n × n` grid of the flat torus `[0,2π)²`.
//!
//! The squared periodic distance splits over the two axes, so every
//! log-domain update is two one-dimensional soft-min passes (`O(n³)`).

use std::f64::consts::PI;

use super::OTResult;
use crate::empirical::EmpiricalMeasure;
use crate::error::{input, Error, Result};
use crate::spectral::StatePoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornOptions {
    /// Final regularization `ε`; `None` uses a tenth of the squared cell width.
    pub epsilon: Option<f64>,
    /// Factor applied to `ε` between scaling stages.
    pub scaling: f64,
    /// L¹ marginal violation accepted at each stage.
    pub tol: f64,
    /// Iteration budget per stage.
    pub max_iter: usize,
}

impl Default for SinkhornOptions {
    fn default() -> Self {
        Self { epsilon: None, scaling: 0.5, tol: 1e-9, max_iter: 20_000 }
    }
}

/// Cell masses of a torus measure on the `n × n` grid, row-major in `(x₁, x₂)`.
pub fn bin_torus(emp: &EmpiricalMeasure, n: usize) -> Result<Vec<f64>> {
    let mut grid = vec![0.0; n * n];
    let cell = |x: f64| (((x.rem_euclid(2.0 * PI)) / (2.0 * PI) * n as f64) as usize).min(n - 1);
    for (x, w) in emp.atoms.iter().zip(&emp.weights) {
        match *x {
            StatePoint::Torus([a, b]) => grid[cell(a) * n + cell(b)] += w,
            _ => return Err(input("torus binning needs torus states")),
        }
    }
    Ok(grid)
}

fn lse(it: impl Iterator<Item = f64>, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(it);
    let mx = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + buf.iter().map(|v| (v - mx).exp()).sum::<f64>().ln()
}

struct Grid {
    n: usize,
    /// One-axis squared periodic distance between cell centers.
    c1: Vec<f64>,
}

impl Grid {
    fn new(n: usize) -> Self {
        let h = 2.0 * PI / n as f64;
        let c1 = (0..n * n)
            .map(|k| {
                let d = (k / n).abs_diff(k % n) as f64 * h;
                let d = d.min(2.0 * PI - d);
                d * d
            })
            .collect();
        Self { n, c1 }
    }

    /// `out_i = −ε LSE_j (h_j − C_ij/ε)` for the separable cost.
    fn softmin(&self, h: &[f64], eps: f64, out: &mut [f64]) {
        let n = self.n;
        let mut t = vec![0.0; n * n];
        let mut buf = Vec::with_capacity(n);
        for j1 in 0..n {
            for i2 in 0..n {
                t[j1 * n + i2] = lse((0..n).map(|j2| h[j1 * n + j2] - self.c1[i2 * n + j2] / eps), &mut buf);
            }
        }
        for i1 in 0..n {
            for i2 in 0..n {
                out[i1 * n + i2] = -eps * lse((0..n).map(|j1| t[j1 * n + i2] - self.c1[i1 * n + j1] / eps), &mut buf);
            }
        }
    }

    /// Entropic cost `⟨a,f⟩ + ⟨b,g⟩` with ε-scaling.
    fn entropic(&self, a: &[f64], b: &[f64], eps_final: f64, opts: &SinkhornOptions) -> Result<f64> {
        let nn = self.n * self.n;
        let la: Vec<f64> = a.iter().map(|x| x.ln()).collect();
        let lb: Vec<f64> = b.iter().map(|x| x.ln()).collect();
        let mut f = vec![0.0; nn];
        let mut g = vec![0.0; nn];
        let mut h = vec![0.0; nn];
        let mut f_new = vec![0.0; nn];
        let mut eps = (2.0 * PI * PI).max(eps_final);
        loop {
            let mut converged = false;
            let mut residual = f64::INFINITY;
            for _ in 0..opts.max_iter {
                for k in 0..nn {
                    h[k] = la[k] + f[k] / eps;
                }
                self.softmin(&h, eps, &mut g);
                for k in 0..nn {
                    h[k] = lb[k] + g[k] / eps;
                }
                self.softmin(&h, eps, &mut f_new);
                // row marginal of the current plan is a_i e^{(f_i − f̃_i)/ε}
                residual = a
                    .iter()
                    .zip(f.iter().zip(&f_new))
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, (fo, fn_))| w * (((fo - fn_) / eps).exp() - 1.0).abs())
                    .sum();
                std::mem::swap(&mut f, &mut f_new);
                if residual < opts.tol {
                    converged = true;
                    break;
                }
            }
            if !converged && eps <= eps_final {
                return Err(Error::NotConverged { iterations: opts.max_iter, residual });
            }
            if eps <= eps_final {
                break;
            }
            eps = (eps * opts.scaling).max(eps_final);
        }
        let dot = |w: &[f64], p: &[f64]| w.iter().zip(p).filter(|(x, _)| **x > 0.0).map(|(x, y)| x * y).sum::<f64>();
        Ok(dot(a, &f) + dot(b, &g))
    }
}

impl Grid {
    /// `OT_ε(a, a) = 2⟨a, f⟩` from the symmetric fixed point
    /// `f = softmin(log a + f/ε)`, iterated with averaging.
    fn entropic_self(&self, a: &[f64], eps_final: f64, opts: &SinkhornOptions) -> Result<f64> {
        let nn = self.n * self.n;
        let la: Vec<f64> = a.iter().map(|x| x.ln()).collect();
        let mut f = vec![0.0; nn];
        let mut h = vec![0.0; nn];
        let mut t = vec![0.0; nn];
        let mut eps = (2.0 * PI * PI).max(eps_final);
        loop {
            let mut residual = f64::INFINITY;
            for _ in 0..opts.max_iter {
                for k in 0..nn {
                    h[k] = la[k] + f[k] / eps;
                }
                self.softmin(&h, eps, &mut t);
                residual = a
                    .iter()
                    .zip(f.iter().zip(&t))
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, (fo, fn_))| w * (((fo - fn_) / eps).exp() - 1.0).abs())
                    .sum();
                for k in 0..nn {
                    f[k] = 0.5 * (f[k] + t[k]);
                }
                if residual < opts.tol {
                    break;
                }
            }
            if eps <= eps_final {
                if residual >= opts.tol {
                    return Err(Error::NotConverged { iterations: opts.max_iter, residual });
                }
                break;
            }
            eps = (eps * opts.scaling).max(eps_final);
        }
        Ok(2.0 * a.iter().zip(&f).filter(|(x, _)| **x > 0.0).map(|(x, y)| x * y).sum::<f64>())
    }
}

/// Debiased Sinkhorn divergence between cell masses `a` and the uniform law.
///
/// `bound` reports the entropic bias estimate `2ε·log(e·D²/ε)` for the
/// torus diameter `D`.
pub fn sinkhorn_grid_torus(a: &[f64], n: usize, opts: &SinkhornOptions) -> Result<OTResult> {
    if n == 0 || n > 256 {
        return Err(input(format!("grid size {n} outside 1..=256")));
    }
    if a.len() != n * n {
        return Err(input(format!("{} cell masses for a {n}×{n} grid", a.len())));
    }
    let total: f64 = a.iter().sum();
    if (total - 1.0).abs() > 1e-9 || a.iter().any(|w| *w < 0.0) {
        return Err(input("cell masses must be non-negative and sum to 1"));
    }
    let h = 2.0 * PI / n as f64;
    let eps = opts.epsilon.unwrap_or(0.1 * h * h);
    let grid = Grid::new(n);
    let b = vec![1.0 / (n * n) as f64; n * n];
    let ab = grid.entropic(a, &b, eps, opts)?;
    let aa = grid.entropic_self(a, eps, opts)?;
    let bb = grid.entropic_self(&b, eps, opts)?;
    let div = (ab - 0.5 * aa - 0.5 * bb).max(0.0);
    let diam2 = 2.0 * PI * PI;
    let bias = 2.0 * eps * (std::f64::consts::E * diam2 / eps).ln();
    let mut r = OTResult::from_cost(2.0, div, 0.0, "sinkhorn-debiased");
    r.bound = bias;
    Ok(r)
}
