//! Independent finite-difference eigen-solver for one-dimensional models.
//!
//! The generator is discretized in weak form on a cell-centered grid
//! (`∫p f′g′` against `∫w fg`) with exact cell masses, symmetrized as
//! `M^{-1/2} K M^{-1/2}`, and the low spectrum of the tridiagonal result is
//! found by Sturm-sequence bisection.

use serde::Serialize;

use super::{Boundary, SpectralModel, SturmLiouville, WrightFisher};
use crate::error::{capability, input, Result};

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiag {
    /// Number of eigenvalues strictly below `sigma`.
    fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let off2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - sigma - if i == 0 { 0.0 } else { off2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + sigma.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based).
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1e-300) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn lowest(&self, n: usize) -> Vec<f64> {
        (0..n.min(self.diag.len())).map(|k| self.eigenvalue(k)).collect()
    }
}

/// Ends of `[lo, hi]` at which the boundary condition is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
enum EndCondition {
    Flux,
    Dirichlet,
}

fn assemble(sl: &SturmLiouville, lo: f64, hi: f64, cells: usize, ends: EndCondition) -> Tridiag {
    let h = (hi - lo) / cells as f64;
    let face = |j: usize| lo + j as f64 * h;
    let mass: Vec<f64> = (0..cells).map(|j| (sl.mass)(face(j), face(j + 1))).collect();
    let pf: Vec<f64> = (0..=cells).map(|j| (sl.p)(face(j))).collect();
    let mut diag = vec![0.0; cells];
    let mut off = vec![0.0; cells.saturating_sub(1)];
    for j in 1..cells {
        let k = pf[j] / h;
        diag[j - 1] += k;
        diag[j] += k;
        off[j - 1] = -k / (mass[j - 1] * mass[j]).sqrt();
    }
    if ends == EndCondition::Dirichlet {
        // ghost value −f at distance h/2
        diag[0] += 2.0 * pf[0] / h;
        diag[cells - 1] += 2.0 * pf[cells] / h;
    }
    for j in 0..cells {
        diag[j] /= mass[j];
    }
    Tridiag { diag, off }
}

/// Eigenvalues `λ_1 ≤ … ≤ λ_n` of the discretized `−L̂` (the zero mode is dropped).
pub fn eigen_oracle_fd(model: &dyn SpectralModel, grid_size: usize, n_modes: usize) -> Result<Vec<f64>> {
    if grid_size < 200 {
        return Err(input(format!("grid_size {grid_size} below the minimum of 200")));
    }
    let sl = model
        .sturm_liouville()
        .ok_or_else(|| capability(format!("{}: finite-difference oracle needs a one-dimensional model", model.id())))?;
    let mut vals = match sl.boundary {
        Boundary::NoFlux => assemble(&sl, sl.lo, sl.hi, grid_size, EndCondition::Flux).lowest(n_modes + 1),
        Boundary::PeriodicSymmetric => {
            // even and odd modes about the mirror axes
            let mid = 0.5 * (sl.lo + sl.hi);
            let mut v = assemble(&sl, sl.lo, mid, grid_size, EndCondition::Flux).lowest(n_modes + 1);
            v.extend(assemble(&sl, sl.lo, mid, grid_size, EndCondition::Dirichlet).lowest(n_modes + 1));
            v.sort_by(f64::total_cmp);
            v
        }
    };
    vals.remove(0);
    vals.truncate(n_modes);
    Ok(vals)
}

/// Richardson extrapolation of one eigenvalue over a grid-doubling sequence.
#[derive(Debug, Clone, Serialize)]
pub struct Extrapolation {
    pub grids: Vec<usize>,
    pub values: Vec<f64>,
    /// Observed convergence order.
    pub order: f64,
    pub extrapolated: f64,
    /// Size of the last extrapolation correction.
    pub error: f64,
}

/// Extrapolate mode `index` (1-based) from three grids, each twice the previous.
pub fn richardson(model: &dyn SpectralModel, grids: [usize; 3], index: usize) -> Result<Extrapolation> {
    let values =
        grids.iter().map(|&g| eigen_oracle_fd(model, g, index).map(|v| v[index - 1])).collect::<Result<Vec<_>>>()?;
    let (d1, d2) = (values[1] - values[0], values[2] - values[1]);
    let ratio = (grids[1] as f64 / grids[0] as f64).max(1.0 + 1e-12);
    let order = if d2 == 0.0 || d1 == 0.0 || d1.signum() != d2.signum() {
        2.0
    } else {
        ((d1 / d2).ln() / ratio.ln()).clamp(0.5, 8.0)
    };
    let correction = d2 / (ratio.powf(order) - 1.0);
    Ok(Extrapolation {
        grids: grids.to_vec(),
        values: values.clone(),
        order,
        extrapolated: values[2] + correction,
        error: correction.abs(),
    })
}

/// Outcome of testing the two Wright–Fisher eigenvalue laws against the oracle.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResolution {
    pub a: f64,
    pub b: f64,
    pub mode: usize,
    /// `(a+b)i`.
    pub linear_candidate: f64,
    /// `i(i−1)/2 + (a+b)i`.
    pub quadratic_candidate: f64,
    pub evidence: Extrapolation,
    /// Distance to the rejected candidate minus distance to the chosen one.
    pub margin: f64,
    /// Whether `margin > 10 · evidence.error`.
    pub decided: bool,
    pub chosen: f64,
    pub law: &'static str,
}

/// Decide `λ_2` for `WF(a, b)` between the linear and the quadratic law.
pub fn resolve_wright_fisher_spectrum(a: f64, b: f64, grids: [usize; 3]) -> Result<SpectrumResolution> {
    let wf = WrightFisher::new(a, b)?;
    let mode = 2;
    let evidence = richardson(&wf, grids, mode)?;
    let lin = wf.linear_eigenvalue(mode);
    let quad = wf.eigenvalue(mode);
    let (dl, dq) = ((evidence.extrapolated - lin).abs(), (evidence.extrapolated - quad).abs());
    let (chosen, law) = if dq <= dl { (quad, "i(i-1)/2+(a+b)i") } else { (lin, "(a+b)i") };
    let margin = (dl - dq).abs();
    Ok(SpectrumResolution {
        a,
        b,
        mode,
        linear_candidate: lin,
        quadratic_candidate: quad,
        decided: margin > 10.0 * evidence.error,
        margin,
        evidence,
        chosen,
        law,
    })
}
