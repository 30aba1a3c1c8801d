//! Paths of the diffusion `X` and of the subordinated process `X^B_t = X_{S_t}`.

use std::str::FromStr;

use serde::Serialize;

use crate::bernstein::BernsteinFn;
use crate::error::{capability, input, Error, Result};
use crate::rng::{Purpose, StreamKey, StreamRng};
use crate::spectral::{Circle, ConditionedInterval, OtGeometry, SpectralModel, StatePoint, StepControl, WrightFisher};

/// Initial law `ν` of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitLaw {
    /// `ν = μ`.
    Invariant,
    /// `ν = δ_x`, coordinates as written in config (`"point:0.3"`, `"point:1;2"`).
    Point(Vec<f64>),
}

impl FromStr for InitLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "invariant" {
            return Ok(Self::Invariant);
        }
        let coords = s
            .strip_prefix("point:")
            .ok_or_else(|| input(format!("initial law '{s}' is neither 'invariant' nor 'point:<coord>'")))?;
        let v = coords
            .split(';')
            .map(|c| c.trim().parse::<f64>().map_err(|_| input(format!("bad coordinate '{c}' in '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Point(v))
    }
}

impl std::fmt::Display for InitLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Invariant => write!(f, "invariant"),
            Self::Point(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "point:{}", parts.join(";"))
            }
        }
    }
}

impl InitLaw {
    /// Draw `X_0` for `model`.
    pub fn draw(&self, model: &dyn SpectralModel, rng: &mut StreamRng) -> Result<StatePoint> {
        match self {
            Self::Invariant => model.sample_invariant(rng),
            Self::Point(v) => {
                let x = match (model.ot_geometry(), v.as_slice()) {
                    (OtGeometry::Circle, [a]) => StatePoint::Angle(*a),
                    (OtGeometry::Torus, [a, b]) => StatePoint::Torus([*a, *b]),
                    (OtGeometry::Interval, [u]) => StatePoint::Unit(*u),
                    (OtGeometry::Unsupported, _) => return Err(capability(format!("{}: no state space", model.id()))),
                    _ => return Err(input(format!("point {v:?} has the wrong dimension for {}", model.id()))),
                };
                if !model.contains(&x) {
                    return Err(input(format!("initial point {x} outside the domain of {}", model.id())));
                }
                Ok(x)
            }
        }
    }
}

/// One observed path on the grid `s_j = jΔ`.
#[derive(Debug, Clone, Serialize)]
pub struct PathSample {
    pub model: String,
    pub delta: f64,
    pub times: Vec<f64>,
    pub states: Vec<StatePoint>,
    /// `S_{s_j}`.
    pub clock: Vec<f64>,
    pub seed: u64,
    pub horizon_index: u32,
    pub replica: u32,
}

impl PathSample {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
}

fn run_kernel(
    model: &dyn SpectralModel,
    durations: &[f64],
    x0: StatePoint,
    ctl: &StepControl,
    rng: &mut StreamRng,
) -> Result<Vec<StatePoint>> {
    let mut out = Vec::with_capacity(durations.len() + 1);
    let mut x = x0;
    out.push(x);
    for &d in durations {
        if d < 0.0 {
            return Err(input(format!("negative duration {d}")));
        }
        x = model.advance(&x, d, ctl, rng)?;
        out.push(x);
    }
    Ok(out)
}

fn scalars(states: Vec<StatePoint>) -> Vec<f64> {
    states.into_iter().map(|s| s.scalar().unwrap_or(f64::NAN)).collect()
}

/// Exact wrapped-Gaussian kernel with drift `c` on `ℝ/2πℤ`.
pub fn simulate_circle(c: f64, durations: &[f64], x0: f64, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let states = run_kernel(&Circle::new(c), durations, StatePoint::Angle(x0), &StepControl::default(), rng)?;
    Ok(scalars(states))
}

/// Clamped Euler–Maruyama for the Wright–Fisher diffusion.
pub fn simulate_wright_fisher(
    a: f64,
    b: f64,
    durations: &[f64],
    x0: f64,
    ctl: &StepControl,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    let wf = WrightFisher::new(a, b)?;
    if !(0.0..=1.0).contains(&x0) {
        return Err(input(format!("x0={x0} outside [0,1]")));
    }
    Ok(scalars(run_kernel(&wf, durations, StatePoint::Unit(x0), ctl, rng)?))
}

/// Euler–Maruyama with boundary-adapted substeps for Brownian motion conditioned to stay in `(0,1)`.
pub fn simulate_conditioned_interval(
    durations: &[f64],
    x0: f64,
    ctl: &StepControl,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(input(format!("x0={x0} outside (0,1)")));
    }
    Ok(scalars(run_kernel(&ConditionedInterval, durations, StatePoint::Unit(x0), ctl, rng)?))
}

/// Number of grid steps `t/Δ`, which must be an integer.
pub fn grid_steps(horizon: f64, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && horizon > 0.0) {
        return Err(input(format!("horizon {horizon} and step {delta} must be positive")));
    }
    let m = horizon / delta;
    let r = m.round();
    if (m - r).abs() > 1e-9 * m.max(1.0) || r < 1.0 {
        return Err(input(format!("step {delta} does not divide horizon {horizon}")));
    }
    Ok(r as usize)
}

/// Simulate `X^B` on `{jΔ : 0 ≤ j ≤ t/Δ}`.
///
/// The clock, the initial state and the diffusion use separate streams of `key`.
pub fn simulate_subordinated(
    model: &dyn SpectralModel,
    bern: &BernsteinFn,
    horizon: f64,
    delta: f64,
    init: &InitLaw,
    ctl: &StepControl,
    key: StreamKey,
) -> Result<PathSample> {
    if !model.can_simulate() {
        return Err(capability(format!("{}: path simulation is not available", model.id())));
    }
    let m = grid_steps(horizon, delta)?;
    let times: Vec<f64> = (0..=m).map(|j| j as f64 * delta).collect();
    let clock = bern.sample_path(&times, &mut key.with_purpose(Purpose::Subordinator).rng())?.values;
    let x0 = init.draw(model, &mut key.with_purpose(Purpose::Initial).rng())?;
    let durations: Vec<f64> = clock.windows(2).map(|w| w[1] - w[0]).collect();
    let states = run_kernel(model, &durations, x0, ctl, &mut key.with_purpose(Purpose::Diffusion).rng())?;
    Ok(PathSample {
        model: model.id().to_string(),
        delta,
        times,
        states,
        clock,
        seed: key.seed,
        horizon_index: key.horizon,
        replica: key.replica,
    })
}
