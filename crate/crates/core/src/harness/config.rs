//! JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinConfig, BernsteinFn};
use crate::error::{input, parameter, Result};
use crate::simulate::InitLaw;
use crate::spectral::{ModelParams, StepControl};

fn default_bernstein() -> BernsteinConfig {
    BernsteinConfig { kind: "identity".into(), alpha: None, drift: None }
}

fn default_horizons() -> Vec<f64> {
    (5..=10).map(|e| f64::powi(2.0, e)).collect()
}

fn default_replicas() -> usize {
    200
}

fn default_n_modes() -> usize {
    256
}

fn default_seed() -> u64 {
    1
}

fn one() -> f64 {
    1.0
}

fn default_init() -> String {
    "invariant".into()
}

fn default_mode() -> usize {
    1
}

fn default_ledoux_r() -> f64 {
    0.05
}

fn default_torus_grid() -> usize {
    32
}

fn default_suites() -> Vec<String> {
    vec!["all".into()]
}

/// One experiment. Every field except `model` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Registry id, e.g. `circle`, `wright-fisher`.
    pub model: String,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default = "default_bernstein")]
    pub bernstein: BernsteinConfig,
    /// Strictly increasing horizons `t`.
    #[serde(default = "default_horizons")]
    pub horizons: Vec<f64>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// Fixed grid step; by default `min(t/2¹⁴, 10⁻²)` per horizon.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Truncation `N` of `ψ` and `Ξ`.
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Transport order `2p` and moment `2q` of `W_{2p}^{2q}`.
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default = "one")]
    pub q: f64,
    /// `invariant` or `point:<coords>`.
    #[serde(default = "default_init")]
    pub init: String,
    /// Mode index whose CLT is tracked.
    #[serde(default = "default_mode")]
    pub clt_mode: usize,
    /// Mode indices whose `ψ_i²` are reported.
    #[serde(default)]
    pub psi_modes: Vec<usize>,
    /// Smoothing time of the Ledoux check.
    #[serde(default = "default_ledoux_r")]
    pub ledoux_r: f64,
    /// Replicas rerun at `Δ/2` on the largest horizon to expose quadrature bias.
    #[serde(default)]
    pub delta_check_replicas: usize,
    /// Cells per axis for torus Sinkhorn solves.
    #[serde(default = "default_torus_grid")]
    pub torus_grid: usize,
    #[serde(default)]
    pub step_control: Option<StepControl>,
    /// Validation suites (`all`, `laplace`, `ot`, `eigen`, `zn1`, `ledoux`).
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
}

/// A config file holds one experiment or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    One(Box<ExperimentConfig>),
    Many(Vec<ExperimentConfig>),
}

pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)?;
    parse_configs(&text)
}

pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>> {
    let cfgs = match serde_json::from_str::<ConfigFile>(text) {
        Ok(ConfigFile::One(c)) => vec![*c],
        Ok(ConfigFile::Many(v)) => v,
        // reparse as a single object for a precise message
        Err(_) => vec![serde_json::from_str::<ExperimentConfig>(text)?],
    };
    for c in &cfgs {
        c.validate()?;
    }
    Ok(cfgs)
}

impl ExperimentConfig {
    pub fn new(model: &str) -> Self {
        serde_json::from_value(serde_json::json!({ "model": model })).expect("defaults deserialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(input("at least one horizon is required"));
        }
        if self.horizons.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(parameter("horizons must be positive and finite"));
        }
        if self.horizons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(parameter("horizons must be strictly increasing"));
        }
        if self.replicas == 0 {
            return Err(parameter("replicas must be positive"));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(parameter(format!("grid step {d} must be positive")));
            }
        }
        if self.n_modes == 0 {
            return Err(parameter("n_modes must be positive"));
        }
        if !(self.p >= 1.0 && self.q >= 1.0) {
            return Err(parameter("p and q must be at least 1"));
        }
        if self.clt_mode == 0
            || self.psi_modes.iter().any(|&i| i == 0 || i > self.n_modes)
            || self.clt_mode > self.n_modes
        {
            return Err(parameter(format!("mode indices must lie in 1..={}", self.n_modes)));
        }
        if !(self.ledoux_r > 0.0) {
            return Err(parameter("ledoux_r must be positive"));
        }
        self.bernstein()?;
        self.init_law()?;
        Ok(())
    }

    pub fn bernstein(&self) -> Result<BernsteinFn> {
        BernsteinFn::from_config(&self.bernstein)
    }

    pub fn init_law(&self) -> Result<InitLaw> {
        self.init.parse()
    }

    pub fn step_control(&self) -> StepControl {
        self.step_control.unwrap_or_default()
    }

    /// Grid step used at horizon `t`.
    pub fn delta_for(&self, t: f64) -> f64 {
        self.delta.unwrap_or_else(|| default_delta(t))
    }

    /// Whether standard errors are trusted for confidence intervals.
    pub fn ci_reliable(&self) -> bool {
        self.replicas >= 30
    }
}

/// `min(t/2¹⁴, 10⁻²)`.
pub fn default_delta(t: f64) -> f64 {
    (t / 16384.0).min(1e-2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = parse_configs(r#"{"model": "circle", "params": {"c": 2.0}}"#).unwrap().pop().unwrap();
        assert_eq!(c.horizons.len(), 6);
        assert_eq!(c.replicas, 200);
        assert_eq!(c.params.c, 2.0);
        assert_eq!(c.delta_for(32.0), 32.0 / 16384.0);
        assert_eq!(c.delta_for(1024.0), 1e-2);
        assert!(c.ci_reliable());
    }

    #[test]
    fn lists_and_rejections() {
        let v = parse_configs(r#"[{"model": "circle"}, {"model": "wright-fisher", "replicas": 5}]"#).unwrap();
        assert_eq!(v.len(), 2);
        assert!(!v[1].ci_reliable());
        assert!(parse_configs(r#"{"model": "circle", "horizons": [4, 2]}"#).is_err());
        assert!(parse_configs(r#"{"model": "circle", "bernstein": {"kind": "stable"}}"#).is_err());
        assert!(parse_configs(r#"{"model": "circle", "typo": 1}"#).is_err());
        assert!(parse_configs(r#"{"model": "circle", "init": "point:"}"#).is_err());
    }
}
