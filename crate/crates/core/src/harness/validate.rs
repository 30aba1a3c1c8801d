//! Self-checks run by `empirw validate`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{Experiment, LEDOUX_SLACK};
use super::Summary;
use crate::bernstein::BernsteinFn;
use crate::empirical::EmpiricalMeasure;
use crate::error::Result;
use crate::ot::{w2_discrete_exact, wp_interval, DiscreteTarget};
use crate::predictions::{v_b, zn1, VbMethod};
use crate::rng::{stream, Purpose};
use crate::spectral::{
    eigen_oracle_fd, resolve_wright_fisher_spectrum, Circle, ConditionedInterval, IntervalNeumann, ModelRegistry,
    SpectralModel, StatePoint, WrightFisher, WF_RESOLUTION_GRIDS,
};

pub const SUITES: [&str; 5] = ["laplace", "ot", "eigen", "zn1", "ledoux"];
/// Subordinator draws per stability index in the Laplace suite.
pub const LAPLACE_DRAWS: usize = 1_000_000;
pub const LAPLACE_ALPHAS: [f64; 3] = [0.3, 0.5, 0.8];
pub const LAPLACE_RS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
const LAPLACE_CHUNKS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationLedger {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationLedger {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn suite<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = &'a Check> {
        self.checks.iter().filter(move |c| c.suite == suite)
    }
}

fn check(suite: &str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { suite: suite.into(), name: name.into(), passed, detail: detail.into() }
}

/// Errors become failed checks so the ledger always comes back whole.
fn guarded(suite: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![check(suite, "completed", false, e.to_string())])
}

/// Run the suites named in `cfg.suites` (`all` selects every suite).
pub fn validate(cfg: &ExperimentConfig) -> ValidationLedger {
    let all = cfg.suites.iter().any(|s| s == "all");
    let mut checks = Vec::new();
    for suite in SUITES {
        if !(all || cfg.suites.iter().any(|s| s == suite)) {
            continue;
        }
        let seed = cfg.seed;
        checks.extend(match suite {
            "laplace" => guarded(suite, || laplace_suite(seed, LAPLACE_DRAWS)),
            "ot" => guarded(suite, || ot_suite(seed)),
            "eigen" => guarded(suite, eigen_suite),
            "zn1" => guarded(suite, zn1_suite),
            _ => guarded(suite, || ledoux_suite(seed, cfg.ledoux_r)),
        });
    }
    for s in &cfg.suites {
        if s != "all" && !SUITES.contains(&s.as_str()) {
            checks.push(check("config", format!("suite {s}"), false, "unknown suite"));
        }
    }
    ValidationLedger { seed: cfg.seed, checks }
}

/// Largest standardized deviation `|mean e^{−rS₁} − e^{−B(r)}|/SE` over `rs`,
/// drawing from `sampler` and comparing against `target`.
pub fn laplace_deviation(
    sampler: &BernsteinFn,
    target: &BernsteinFn,
    draws: usize,
    rs: &[f64],
    seed: u64,
) -> Result<Vec<(f64, f64, f64)>> {
    let per = draws.div_ceil(LAPLACE_CHUNKS);
    let samples: Vec<Vec<f64>> = (0..LAPLACE_CHUNKS as u32)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c, Purpose::Subordinator);
            (0..per).map(|_| sampler.sample_increment(1.0, &mut rng)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let s: Vec<f64> = samples.concat();
    Ok(rs
        .iter()
        .map(|&r| {
            let v: Vec<f64> = s.iter().map(|x| (-r * x).exp()).collect();
            let sum = Summary::of(&v);
            let want = (-target.evaluate(r)).exp();
            (r, sum.mean - want, sum.stderr)
        })
        .collect())
}

fn laplace_suite(seed: u64, draws: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for alpha in LAPLACE_ALPHAS {
        let b = BernsteinFn::stable(alpha)?;
        let dev = laplace_deviation(&b, &b, draws, &LAPLACE_RS, seed)?;
        let worst = dev.iter().map(|(_, d, se)| d.abs() / se).fold(0.0, f64::max);
        out.push(check(
            "laplace",
            format!("stable({alpha})"),
            worst < 3.0,
            format!("max |dev|/SE = {worst:.3} over r ∈ {LAPLACE_RS:?}, N = {draws}"),
        ));
    }
    // a sampler with the wrong index must be caught
    let target = BernsteinFn::stable(0.5)?;
    let corrupted = BernsteinFn::stable(0.6)?;
    let dev = laplace_deviation(&corrupted, &target, draws / 10, &LAPLACE_RS, seed ^ 0x5eed)?;
    let worst = dev.iter().map(|(_, d, se)| d.abs() / se).fold(0.0, f64::max);
    out.push(check(
        "laplace",
        "negative control: α mis-set to 0.6 against stable(0.5)",
        worst >= 3.0,
        format!("max |dev|/SE = {worst:.1} (must reject)"),
    ));
    Ok(out)
}

/// Minimum of `Σ_i C[i, σ(i)]/n` over all permutations; with uniform
/// marginals this is the transport optimum (Birkhoff).
pub fn assignment_by_enumeration(cost: &[f64], n: usize) -> f64 {
    fn rec(cost: &[f64], n: usize, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if row == n {
            *best = best.min(acc);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                rec(cost, n, row + 1, used, acc + cost[row * n + j], best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(cost, n, 0, &mut vec![false; n], 0.0, &mut best);
    best / n as f64
}

fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn ot_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = stream(seed, 0, Purpose::Auxiliary);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (n, m) = (rng.random_range(1..=500), rng.random_range(1..=500));
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let (a, b) = (random_weights(&mut rng, n), random_weights(&mut rng, m));
        let emp = EmpiricalMeasure::new(xs.iter().map(|&x| StatePoint::Unit(x)).collect(), a.clone(), 1.0)?;
        let target = DiscreteTarget::new(&ys.iter().copied().zip(b.iter().copied()).collect::<Vec<_>>());
        let quantile = wp_interval(&emp, &target, 2.0)?.cost;
        let cost: Vec<f64> = xs.iter().flat_map(|x| ys.iter().map(move |y| (x - y).powi(2))).collect();
        let exact = w2_discrete_exact(&a, &b, &cost)?.cost;
        worst = worst.max((quantile - exact).abs());
    }
    let mut out = vec![check(
        "ot",
        "monotone coupling vs network simplex, 50 instances",
        worst < 1e-6,
        format!("max |ΔW₂²| = {worst:.2e}"),
    )];
    let mut worst6 = 0.0f64;
    for _ in 0..20 {
        let cost: Vec<f64> = (0..36).map(|_| rng.random::<f64>()).collect();
        let u = vec![1.0 / 6.0; 6];
        let simplex = w2_discrete_exact(&u, &u, &cost)?.cost;
        worst6 = worst6.max((simplex - assignment_by_enumeration(&cost, 6)).abs());
    }
    out.push(check("ot", "network simplex vs enumeration, 6×6", worst6 < 1e-9, format!("max gap = {worst6:.2e}")));
    Ok(out)
}

fn eigen_suite() -> Result<Vec<Check>> {
    let wf = WrightFisher::new(1.0, 1.0)?;
    let models: [(&str, &dyn SpectralModel); 4] = [
        ("circle", &Circle::new(0.0)),
        ("interval-neumann", &IntervalNeumann),
        ("conditioned-interval", &ConditionedInterval),
        ("wright-fisher(1,1)", &wf),
    ];
    let mut out = Vec::new();
    for (name, model) in models {
        let listed = model.eigen_data(4)?;
        let fd = eigen_oracle_fd(model, 2000, 4)?;
        let worst = listed.iter().zip(&fd).map(|(m, f)| (m.lambda - f).abs() / m.lambda).fold(0.0, f64::max);
        out.push(check(
            "eigen",
            format!("{name}: first 4 eigenvalues vs finite differences"),
            worst < 1e-3,
            format!("max relative gap {worst:.2e}"),
        ));
    }
    let res = resolve_wright_fisher_spectrum(1.0, 1.0, WF_RESOLUTION_GRIDS)?;
    out.push(check(
        "eigen",
        "wright-fisher λ₂ law decided",
        res.decided,
        format!("extrapolated {:.6} ± {:.1e}, margin {:.3}", res.evidence.extrapolated, res.evidence.error, res.margin),
    ));
    Ok(out)
}

fn zn1_suite() -> Result<Vec<Check>> {
    let c = 2.0;
    let mut out = Vec::new();
    for k in 1..=3u32 {
        let kk = (k * k) as f64;
        let closure = zn1(kk, c * c * kk / (kk + c * c));
        let want = 1.0 / (kk + c * c);
        out.push(check(
            "zn1",
            format!("closure k={k}, c={c}"),
            (closure - want).abs() < 1e-12,
            format!("{closure} vs {want}"),
        ));
    }
    let model = ModelRegistry::default().build("circle", &crate::spectral::ModelParams { c, ..Default::default() })?;
    for i in [1usize, 3] {
        let k = i.div_ceil(2) as f64;
        let got = v_b(model.as_ref(), &BernsteinFn::Identity, i, &VbMethod::Analytic)?.value;
        let want = 1.0 / (k * k + c * c);
        out.push(check(
            "zn1",
            format!("analytic V(φ_{i}) at c={c}"),
            (got - want).abs() < 1e-12,
            format!("{got} vs {want}"),
        ));
    }
    Ok(out)
}

/// Circle `c = 0`, one horizon, 100 replicas: `W₂(μ_{t,r},μ)² ≤ 4Ξ_r/t + slack`.
pub fn ledoux_suite(seed: u64, r: f64) -> Result<Vec<Check>> {
    let mut cfg = ExperimentConfig::new("circle");
    cfg.horizons = vec![64.0];
    cfg.replicas = 100;
    cfg.seed = seed;
    cfg.ledoux_r = r;
    let exp = Experiment::new(&cfg, &ModelRegistry::default())?;
    let reps = exp.horizon(0, 64.0, cfg.delta_for(64.0), cfg.replicas)?;
    let slack: Vec<f64> = reps.iter().filter_map(|s| s.ledoux_slack).collect();
    let violations = slack.iter().filter(|s| **s < 0.0).count();
    let min = slack.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(vec![check(
        "ledoux",
        format!("100 circle replicas, r = {r}, slack {LEDOUX_SLACK}"),
        violations == 0 && slack.len() == 100,
        format!("{violations} violations, smallest margin {min:.3e}"),
    )])
}
