//! String-id catalog of spectral models.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    resolve_wright_fisher_spectrum, Circle, ConditionedInterval, EigenLaw, IntervalNeumann, SpectralModel, Su2Spectrum,
    Torus2, WrightFisher,
};
use crate::error::{parameter, Error, Result};

/// Grids used to settle the Wright–Fisher eigenvalue law.
pub const WF_RESOLUTION_GRIDS: [usize; 3] = [500, 1000, 2000];

/// Numeric model parameters as they appear in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Drift along the first axis.
    pub c: f64,
    /// Drift along the second torus axis.
    pub c2: f64,
    pub a: f64,
    pub b: f64,
    /// Modes per `(k, n)` pair for the SU(2) spectrum.
    pub multiplicity: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { c: 0.0, c2: 0.0, a: 1.0, b: 1.0, multiplicity: 1 }
    }
}

pub type ModelFactory = fn(&ModelParams) -> Result<Arc<dyn SpectralModel>>;

/// Maps catalog ids to model constructors.
pub struct ModelRegistry {
    factories: BTreeMap<&'static str, ModelFactory>,
}

fn no_drift(id: &str, p: &ModelParams) -> Result<()> {
    if p.c != 0.0 || p.c2 != 0.0 {
        return Err(parameter(format!("{id} is symmetric; drift c must be 0")));
    }
    Ok(())
}

fn finite_drift(p: &ModelParams) -> Result<()> {
    if !p.c.is_finite() || !p.c2.is_finite() {
        return Err(parameter("drift must be finite"));
    }
    Ok(())
}

fn circle(p: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
    finite_drift(p)?;
    Ok(Arc::new(Circle::new(p.c)))
}

fn torus(p: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
    finite_drift(p)?;
    Ok(Arc::new(Torus2::new([p.c, p.c2])))
}

fn neumann(p: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
    no_drift("interval-neumann", p)?;
    Ok(Arc::new(IntervalNeumann))
}

fn conditioned(p: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
    no_drift("interval-conditioned", p)?;
    Ok(Arc::new(ConditionedInterval))
}

/// The eigenvalue law is whichever candidate the finite-difference oracle
/// confirms; an undecided comparison keeps the classical quadratic law.
fn wright_fisher(p: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
    no_drift("wright-fisher", p)?;
    let res = resolve_wright_fisher_spectrum(p.a, p.b, WF_RESOLUTION_GRIDS)?;
    let law = if res.decided && res.law == "(a+b)i" { EigenLaw::Linear } else { EigenLaw::Quadratic };
    Ok(Arc::new(WrightFisher::new(p.a, p.b)?.with_law(law)))
}

fn su2(p: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
    Ok(Arc::new(Su2Spectrum::new(p.multiplicity)?))
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    /// Registry holding the full catalog.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("circle", circle);
        r.register("torus2", torus);
        r.register("interval-neumann", neumann);
        r.register("interval-conditioned", conditioned);
        r.register("wright-fisher", wright_fisher);
        r.register("su2-spectrum", su2);
        r
    }

    /// Add or replace a factory.
    pub fn register(&mut self, id: &'static str, factory: ModelFactory) {
        self.factories.insert(id, factory);
    }

    pub fn build(&self, id: &str, params: &ModelParams) -> Result<Arc<dyn SpectralModel>> {
        let f = self.factories.get(id).ok_or_else(|| Error::UnknownId { kind: "model", id: id.to_string() })?;
        f(params)
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
