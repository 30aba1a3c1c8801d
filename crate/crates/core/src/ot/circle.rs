//! Transport to the uniform law on the circle `ℝ/2πℤ` with arc-length cost.
//!
//! Cutting the circle and shifting the uniform quantile by `β` turns the
//! problem into `min_β Φ(β)`, `Φ(β) = ∫_0^1 |F⁻¹(v) − 2πv + β|^p dv`, which is
//! convex in `β` and piecewise closed-form on the atoms' quantile steps.

use std::f64::consts::PI;

use super::{abs_pow_antiderivative, check_order, sorted_steps, OTResult, TargetLaw, UniformTarget};
use crate::empirical::EmpiricalMeasure;
use crate::error::Result;
use crate::spectral::wrap_angle;

const TWO_PI: f64 = 2.0 * PI;

struct Steps {
    xs: Vec<f64>,
    cum: Vec<f64>,
}

impl Steps {
    fn from_measure(emp: &EmpiricalMeasure) -> Result<Self> {
        let atoms = emp.scalar_atoms()?.into_iter().map(|(x, w)| (wrap_angle(x), w)).collect();
        let (xs, cum) = sorted_steps(atoms);
        Ok(Self { xs, cum })
    }

    /// `Φ(β)`, `Φ′(β)` and the magnitude of the summed terms.
    fn phi(&self, beta: f64, p: f64) -> (f64, f64, f64) {
        let (mut val, mut der, mut mag) = (0.0, 0.0, 0.0);
        let mut a = 0.0;
        for (x, &b) in self.xs.iter().zip(&self.cum) {
            let sa = x + beta - TWO_PI * a;
            let sb = x + beta - TWO_PI * b;
            let (fa, fb) = (abs_pow_antiderivative(sa, p), abs_pow_antiderivative(sb, p));
            val += fa - fb;
            mag += fa.abs() + fb.abs();
            der += sa.abs().powf(p) - sb.abs().powf(p);
            a = b;
        }
        (val / TWO_PI, der / TWO_PI, mag / TWO_PI)
    }

    fn mean(&self) -> f64 {
        let mut a = 0.0;
        let mut m = 0.0;
        for (x, &b) in self.xs.iter().zip(&self.cum) {
            m += (b - a) * x;
            a = b;
        }
        m
    }
}

/// `W_p(emp, uniform)` on the circle.
pub fn wp_circle(emp: &EmpiricalMeasure, p: f64) -> Result<OTResult> {
    check_order(p)?;
    let steps = Steps::from_measure(emp)?;
    let beta = if p == 2.0 {
        // Φ is quadratic: the minimizer cancels the mean of F⁻¹(v) − 2πv
        PI - steps.mean()
    } else {
        let (mut lo, mut hi) = (-TWO_PI, TWO_PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if steps.phi(mid, p).1 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let (cost, der, mag) = steps.phi(beta, p);
    // rounding in the summed antiderivatives plus the residual slope over the last bracket
    let bound = 8.0 * f64::EPSILON * mag + der.abs() * 1e-15;
    Ok(OTResult::from_cost(p, cost, bound, "circle-shift"))
}

/// Interval cost after cutting at `theta`; an atom sitting on the cut sends
/// `split` of its mass to the start and the rest to the end.
fn cut_cost(xs: &[f64], ws: &[f64], theta: f64, first: usize, split: f64, p: f64) -> f64 {
    let m = xs.len();
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(m + 1);
    for k in 0..m {
        let j = (first + k) % m;
        let y = (xs[j] - theta).rem_euclid(TWO_PI);
        if k == 0 && split >= 0.0 {
            atoms.push((0.0, ws[j] * split));
            atoms.push((TWO_PI, ws[j] * (1.0 - split)));
        } else {
            atoms.push((y, ws[j]));
        }
    }
    atoms.retain(|a| a.1 > 0.0);
    let (ys, cum) = sorted_steps(atoms);
    UniformTarget { lo: 0.0, hi: TWO_PI }.step_cost(&ys, &cum, p).0
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x).min(fc).min(fd))
}

/// Literal cut-point search: a 720-point scan of cut angles, then golden-section
/// refinement inside every gap between atoms and over the mass split of every
/// atom. Costs `O(m²)`; meant as an independent check of [`wp_circle`].
pub fn wp_circle_scan(emp: &EmpiricalMeasure, p: f64) -> Result<OTResult> {
    check_order(p)?;
    let steps = Steps::from_measure(emp)?;
    let xs = steps.xs;
    let mut ws = Vec::with_capacity(xs.len());
    let mut a = 0.0;
    for &b in &steps.cum {
        ws.push(b - a);
        a = b;
    }
    let m = xs.len();
    // index of the first atom strictly after θ
    let first_after = |theta: f64| xs.partition_point(|&x| x <= theta) % m;
    let mut best = f64::INFINITY;
    for k in 0..720 {
        let theta = TWO_PI * k as f64 / 720.0;
        if xs.binary_search_by(|x| x.total_cmp(&theta)).is_ok() {
            continue;
        }
        best = best.min(cut_cost(&xs, &ws, theta, first_after(theta), -1.0, p));
    }
    for j in 0..m {
        let next = (j + 1) % m;
        let lo = xs[j];
        let hi = if next == 0 { xs[0] + TWO_PI } else { xs[next] };
        if hi - lo > 1e-12 {
            let (_, v) = golden(|th| cut_cost(&xs, &ws, wrap_angle(th), next, -1.0, p), lo + 1e-14, hi - 1e-14);
            best = best.min(v);
        }
        let (_, v) = golden(|s| cut_cost(&xs, &ws, xs[j], j, s, p), 0.0, 1.0);
        best = best.min(v);
    }
    Ok(OTResult::from_cost(p, best, 1e-10 * best.max(1.0), "circle-scan"))
}
