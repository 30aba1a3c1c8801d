//! Replica loops and per-horizon aggregation.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::fit::{fit_rate, Law, RateFit};
use super::Summary;
use crate::bernstein::BernsteinFn;
use crate::empirical::{empirical_from_path, psi_from_measure, smooth, xi, EmpiricalMeasure};
use crate::error::{capability, Error, Result};
use crate::ot::{bin_torus, sinkhorn_grid_torus, wp_circle, InvariantOt, SinkhornOptions};
use crate::predictions::{eta, regime_for_model, LimitConstant, Rate, RateRegime};
use crate::rng::{Purpose, StreamKey};
use crate::simulate::{simulate_subordinated, InitLaw};
use crate::spectral::{
    resolve_wright_fisher_spectrum, EigenMode, ModelRegistry, OtGeometry, SpectralModel, SpectrumResolution,
    StepControl, WF_RESOLUTION_GRIDS,
};

/// Cells used to discretize `μ_{t,r}` in the Ledoux check.
pub const LEDOUX_CELLS: usize = 4096;
/// Additive slack of the Ledoux inequality.
pub const LEDOUX_SLACK: f64 = 1e-3;
/// Marginal residual of torus Sinkhorn solves; moves `W₂²` by at most
/// `2π²` times this, far below the entropic bias.
pub const TORUS_SINKHORN_TOL: f64 = 1e-7;
/// Horizon-index offset keeping the `Δ/2` rerun on its own streams.
const DELTA_CHECK_STREAM: u32 = 1 << 20;

enum Transport {
    Exact(InvariantOt),
    Torus(usize),
}

/// Everything a replica needs, built once and shared read-only.
pub struct Experiment {
    pub cfg: ExperimentConfig,
    pub model: Arc<dyn SpectralModel>,
    pub bern: BernsteinFn,
    init: InitLaw,
    ctl: StepControl,
    modes: Vec<EigenMode>,
    transport: Transport,
}

/// A horizon `t` with its replicas, in replica order.
pub type HorizonRun = (f64, Vec<ReplicaStats>);

/// Per-replica measurements at one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaStats {
    pub w2sq: f64,
    pub w1: Option<f64>,
    pub w2p_2q: Option<f64>,
    pub xi: f64,
    /// `ψ_i` of `clt_mode` followed by the `psi_modes`.
    pub psi: Vec<f64>,
    /// `4Ξ_r/t + slack − W₂(μ_{t,r}, μ)²`, with `W₂` bounded from above (circle only).
    pub ledoux_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatSummary {
    pub stat: String,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonReport {
    pub t: f64,
    pub delta: f64,
    pub replicas: usize,
    pub stats: Vec<StatSummary>,
    /// Replicas violating the Ledoux inequality, when checked.
    pub ledoux_violations: Option<usize>,
}

impl HorizonReport {
    pub fn stat(&self, name: &str) -> Option<&StatSummary> {
        self.stats.iter().find(|s| s.stat == name)
    }
}

/// Measured limit against `η` at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCheck {
    pub stat: String,
    pub t: f64,
    pub measured: f64,
    pub stderr: f64,
    pub eta: f64,
    /// `(measured − η)/stderr`.
    pub z: f64,
    pub within_3se: bool,
}

/// `t·W₂²` at the largest horizon on the configured grid and at half the step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub t: f64,
    pub delta: f64,
    pub replicas: usize,
    pub mean: f64,
    pub stderr: f64,
    pub mean_half: f64,
    pub stderr_half: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub model: String,
    pub bernstein: String,
    pub c: f64,
    pub init: String,
    pub seed: u64,
    pub p: f64,
    pub q: f64,
    pub n_modes: usize,
    pub horizons: Vec<HorizonReport>,
    /// Fit of mean `W₂²` against the three laws (needs ≥ 4 horizons).
    pub fit: Option<RateFit>,
    pub predicted: RateRegime,
    pub regime_agreement: Option<bool>,
    pub eta: Option<LimitConstant>,
    pub notes: Vec<String>,
    pub limit_checks: Vec<LimitCheck>,
    /// `replicas ≥ 30`.
    pub ci_reliable: bool,
    /// A single replica leaves standard errors undefined (reported as infinite).
    pub ci_infinite: bool,
    /// Mean `W₂²` never rises by more than 2 standard errors between horizons.
    pub monotone: bool,
    pub delta_check: Option<DeltaCheck>,
    pub spectrum_resolution: Option<SpectrumResolution>,
}

impl RateReport {
    /// `(t, mean, stderr)` of a statistic across horizons.
    pub fn series(&self, name: &str) -> Vec<(f64, f64, f64)> {
        self.horizons.iter().filter_map(|h| h.stat(name).map(|s| (h.t, s.mean, s.stderr))).collect()
    }
}

pub fn psi_stat(i: usize) -> String {
    format!("psi_sq_{i}")
}

pub fn abs_psi_stat(i: usize) -> String {
    format!("abs_psi_{i}")
}

pub fn abs_mu_stat(i: usize) -> String {
    format!("abs_mu_{i}")
}

impl Experiment {
    /// Resolve the model and check every capability before any simulation.
    pub fn new(cfg: &ExperimentConfig, registry: &ModelRegistry) -> Result<Self> {
        cfg.validate()?;
        let model = registry.build(&cfg.model, &cfg.params)?;
        if !model.can_simulate() {
            return Err(capability(format!("{}: path simulation is not available", model.id())));
        }
        let transport = match model.ot_geometry() {
            OtGeometry::Circle | OtGeometry::Interval => Transport::Exact(InvariantOt::new(model.clone())?),
            OtGeometry::Torus if cfg.p == 1.0 && cfg.q == 1.0 => Transport::Torus(cfg.torus_grid),
            OtGeometry::Torus => return Err(capability("torus transport is entropic W₂ only; use p = q = 1")),
            OtGeometry::Unsupported => return Err(capability(format!("{}: no transport solver", model.id()))),
        };
        let init = cfg.init_law()?;
        if let InitLaw::Point(_) = &init {
            // surfaces dimension mismatches now rather than inside a replica
            init.draw(model.as_ref(), &mut StreamKey::new(cfg.seed, 0, 0, Purpose::Initial).rng())?;
        }
        let modes = model.eigen_data(cfg.n_modes)?;
        if modes.iter().any(|m| m.evaluator.is_none()) {
            return Err(capability(format!("{}: modes cannot be evaluated", model.id())));
        }
        Ok(Self { bern: cfg.bernstein()?, model, init, ctl: cfg.step_control(), modes, transport, cfg: cfg.clone() })
    }

    fn ledoux_enabled(&self) -> bool {
        self.model.ot_geometry() == OtGeometry::Circle
    }

    /// One replica on its own streams `(seed, horizon, replica)`.
    pub fn replica(&self, horizon_index: u32, t: f64, delta: f64, replica: u32) -> Result<ReplicaStats> {
        let key = StreamKey::new(self.cfg.seed, horizon_index, replica, Purpose::Diffusion);
        let path = simulate_subordinated(self.model.as_ref(), &self.bern, t, delta, &self.init, &self.ctl, key)?;
        let emp = empirical_from_path(&path)?;
        let coeffs = psi_from_measure(&emp, &self.modes)?;
        let (w2sq, w1, w2p_2q) = match &self.transport {
            Transport::Exact(ot) => {
                let w2 = ot.wp(&emp, 2.0)?;
                let w1 = ot.wp(&emp, 1.0)?.value;
                let order = 2.0 * self.cfg.p;
                let wp = if order == 2.0 { w2.value } else { ot.wp(&emp, order)?.value };
                (w2.cost, Some(w1), Some(wp.powf(2.0 * self.cfg.q)))
            }
            Transport::Torus(n) => {
                let cells = bin_torus(&emp, *n)?;
                let opts = SinkhornOptions { tol: TORUS_SINKHORN_TOL, ..SinkhornOptions::default() };
                (sinkhorn_grid_torus(&cells, *n, &opts)?.cost, None, None)
            }
        };
        let mut psi = vec![coeffs.values[self.cfg.clt_mode - 1]];
        psi.extend(self.cfg.psi_modes.iter().map(|&i| coeffs.values[i - 1]));
        let ledoux_slack = if self.ledoux_enabled() { Some(self.ledoux(&coeffs, t)?) } else { None };
        Ok(ReplicaStats { w2sq, w1, w2p_2q, xi: xi(&coeffs), psi, ledoux_slack })
    }

    fn ledoux(&self, coeffs: &crate::empirical::SpectralCoefficients, t: f64) -> Result<f64> {
        let r = self.cfg.ledoux_r;
        // modes with e^{−λr} below 1e-17 cannot move the cell masses
        let keep = self.modes.iter().take_while(|m| m.lambda * r < 39.0).count().max(1);
        let mut truncated = coeffs.clone();
        truncated.values.truncate(keep);
        truncated.lambdas.truncate(keep);
        // sup-norm of the dropped terms: |ψ_i|/√t ≤ √2 and |φ_i| ≤ √2, two modes per frequency
        let k_max = self.modes[keep - 1].lambda.sqrt().round() as u64;
        let tail: f64 = (k_max + 1..).map(|k| 4.0 * (-((k * k) as f64) * r).exp()).take_while(|v| *v > 1e-300).sum();
        let dens = smooth(&truncated, r)?;
        let cells = dens.circle_cells(&self.modes[..keep], LEDOUX_CELLS, tail)?;
        // W_2² ≤ diam² · TV on the circle of diameter π
        let tv = 0.5 * (2.0 * tail + 2.0 * cells.clipped);
        let w2 = wp_circle(&cells.measure, 2.0)?.value + cells.displacement + PI * tv.sqrt();
        Ok(4.0 * smooth(coeffs, r)?.xi_r() / t + LEDOUX_SLACK - w2 * w2)
    }

    /// All replicas at one horizon, in replica order whatever the scheduling.
    pub fn horizon(&self, horizon_index: u32, t: f64, delta: f64, replicas: usize) -> Result<Vec<ReplicaStats>> {
        (0..replicas as u32).into_par_iter().map(|r| self.replica(horizon_index, t, delta, r)).collect()
    }

    fn summarize(&self, t: f64, delta: f64, reps: &[ReplicaStats]) -> HorizonReport {
        let mut stats = Vec::new();
        let mut push = |name: String, values: Vec<f64>| {
            let s = Summary::of(&values);
            stats.push(StatSummary { stat: name, mean: s.mean, stderr: s.stderr });
        };
        push("t_w2sq".into(), reps.iter().map(|r| t * r.w2sq).collect());
        push("w2sq".into(), reps.iter().map(|r| r.w2sq).collect());
        push("xi".into(), reps.iter().map(|r| r.xi).collect());
        push("gap_q".into(), reps.iter().map(|r| (t * r.w2sq - r.xi).abs().powf(self.cfg.q)).collect());
        if reps.iter().all(|r| r.w1.is_some()) {
            push("w1".into(), reps.iter().filter_map(|r| r.w1).collect());
            push("w2p_2q".into(), reps.iter().filter_map(|r| r.w2p_2q).collect());
        }
        let i = self.cfg.clt_mode;
        push(abs_psi_stat(i), reps.iter().map(|r| r.psi[0].abs()).collect());
        push(abs_mu_stat(i), reps.iter().map(|r| r.psi[0].abs() / t.sqrt()).collect());
        for (j, &k) in self.cfg.psi_modes.iter().enumerate() {
            push(psi_stat(k), reps.iter().map(|r| r.psi[j + 1].powi(2)).collect());
        }
        let ledoux_violations = if reps.iter().all(|r| r.ledoux_slack.is_some()) {
            let slack: Vec<f64> = reps.iter().filter_map(|r| r.ledoux_slack).collect();
            let min = slack.iter().copied().fold(f64::INFINITY, f64::min);
            stats.push(StatSummary { stat: "ledoux_min_slack".into(), mean: min, stderr: 0.0 });
            Some(slack.iter().filter(|s| **s < 0.0).count())
        } else {
            None
        };
        HorizonReport { t, delta, replicas: reps.len(), stats, ledoux_violations }
    }

    pub fn run(&self) -> Result<RateReport> {
        Ok(self.run_with_replicas()?.0)
    }

    /// The report together with every replica's raw measurements per horizon.
    pub fn run_with_replicas(&self) -> Result<(RateReport, Vec<HorizonRun>)> {
        let cfg = &self.cfg;
        let mut horizons = Vec::with_capacity(cfg.horizons.len());
        let mut runs = Vec::with_capacity(cfg.horizons.len());
        for (h, &t) in cfg.horizons.iter().enumerate() {
            let delta = cfg.delta_for(t);
            let reps = self.horizon(h as u32, t, delta, cfg.replicas)?;
            horizons.push(self.summarize(t, delta, &reps));
            runs.push((t, reps));
        }
        let last = &runs.last().expect("validated: at least one horizon").1;
        let mut notes = Vec::new();
        let predicted = regime_for_model(self.model.as_ref(), &self.bern, cfg.p, cfg.q)?;
        let eta = match eta(self.model.as_ref(), &self.bern, None, 0.0) {
            Ok(e) => Some(e),
            Err(err @ (Error::Regime(_) | Error::Capability(_))) => {
                notes.push(err.to_string());
                None
            }
            Err(e) => return Err(e),
        };
        let w2 = |h: &HorizonReport| h.stat("w2sq").map(|s| (s.mean, s.stderr)).unwrap_or((f64::NAN, f64::NAN));
        let fit = if horizons.len() >= 4 {
            let (m, e): (Vec<f64>, Vec<f64>) = horizons.iter().map(w2).unzip();
            match fit_rate(&cfg.horizons, &m, &e) {
                Ok(f) => Some(f),
                Err(err) => {
                    notes.push(format!("rate fit skipped: {err}"));
                    None
                }
            }
        } else {
            notes.push("rate fit needs at least 4 horizons".into());
            None
        };
        let regime_agreement = fit.as_ref().map(|f| match predicted.w2 {
            Rate::Parametric => f.regime == Law::InverseT,
            Rate::CriticalLog => f.regime == Law::LogOverT,
            Rate::Polynomial(e) => {
                let e = *e.numer() as f64 / *e.denom() as f64;
                f.regime == Law::Power && (f.gamma_hat - e).abs() <= 3.0 * f.gamma_se
            }
        });
        let mut limit_checks = Vec::new();
        if let Some(e) = &eta {
            let n = horizons.len();
            for h in &horizons[n.saturating_sub(2)..] {
                for stat in ["t_w2sq", "xi"] {
                    if let Some(s) = h.stat(stat) {
                        let z = (s.mean - e.value) / s.stderr;
                        limit_checks.push(LimitCheck {
                            stat: stat.into(),
                            t: h.t,
                            measured: s.mean,
                            stderr: s.stderr,
                            eta: e.value,
                            z,
                            within_3se: z.abs() <= 3.0,
                        });
                    }
                }
            }
        }
        let monotone = horizons.windows(2).all(|w| {
            let ((a, sa), (b, sb)) = (w2(&w[0]), w2(&w[1]));
            b <= a + 2.0 * sa.hypot(sb)
        });
        let delta_check = self.delta_check(last)?;
        let spectrum_resolution = if self.model.id() == "wright-fisher" {
            Some(resolve_wright_fisher_spectrum(cfg.params.a, cfg.params.b, WF_RESOLUTION_GRIDS)?)
        } else {
            None
        };
        let report = RateReport {
            model: self.model.id().into(),
            bernstein: self.bern.to_string(),
            c: cfg.params.c,
            init: self.init.to_string(),
            seed: cfg.seed,
            p: cfg.p,
            q: cfg.q,
            n_modes: cfg.n_modes,
            horizons,
            fit,
            predicted,
            regime_agreement,
            eta,
            notes,
            limit_checks,
            ci_reliable: cfg.ci_reliable(),
            ci_infinite: cfg.replicas < 2,
            monotone,
            delta_check,
            spectrum_resolution,
        };
        Ok((report, runs))
    }

    fn delta_check(&self, last: &[ReplicaStats]) -> Result<Option<DeltaCheck>> {
        let k = self.cfg.delta_check_replicas.min(self.cfg.replicas);
        if k == 0 {
            return Ok(None);
        }
        let h = self.cfg.horizons.len() - 1;
        let t = self.cfg.horizons[h];
        let delta = self.cfg.delta_for(t);
        let half = self.horizon(DELTA_CHECK_STREAM + h as u32, t, 0.5 * delta, k)?;
        let full = Summary::of(&last[..k].iter().map(|r| t * r.w2sq).collect::<Vec<_>>());
        let halved = Summary::of(&half.iter().map(|r| t * r.w2sq).collect::<Vec<_>>());
        Ok(Some(DeltaCheck {
            t,
            delta,
            replicas: k,
            mean: full.mean,
            stderr: full.stderr,
            mean_half: halved.mean,
            stderr_half: halved.stderr,
        }))
    }
}

/// Simulate, measure and aggregate every horizon of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RateReport> {
    Experiment::new(cfg, &ModelRegistry::default())?.run()
}

/// A single replica's measure at one horizon (the `simulate` command).
pub fn sample_measure(
    cfg: &ExperimentConfig,
    horizon_index: usize,
    replica: u32,
) -> Result<(crate::simulate::PathSample, EmpiricalMeasure)> {
    let exp = Experiment::new(cfg, &ModelRegistry::default())?;
    let t = *cfg.horizons.get(horizon_index).ok_or_else(|| crate::error::input("horizon index out of range"))?;
    let key = StreamKey::new(cfg.seed, horizon_index as u32, replica, Purpose::Diffusion);
    let path = simulate_subordinated(exp.model.as_ref(), &exp.bern, t, cfg.delta_for(t), &exp.init, &exp.ctl, key)?;
    let emp = empirical_from_path(&path)?;
    Ok((path, emp))
}
