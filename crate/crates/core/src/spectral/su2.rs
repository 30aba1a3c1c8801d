use super::{Dims, EigenMode, OtGeometry, SpectralModel, StatePoint, StepControl};
use crate::error::{capability, parameter, Result};
use crate::rng::StreamRng;

/// Spectrum-only model of the subelliptic Laplacian on SU(2): eigenvalues
/// `4k(k+|n|+1) + 2|n|` over `(k, n) ∈ ℤ₊ × ℤ`, one group of modes per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Spectrum {
    /// Modes contributed by each `(k, n)` pair.
    multiplicity: u32,
}

impl Su2Spectrum {
    pub fn new(multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(parameter("SU(2) multiplicity must be positive"));
        }
        Ok(Self { multiplicity })
    }

    pub fn eigenvalue(k: u64, n: i64) -> u64 {
        let m = n.unsigned_abs();
        4 * k * (k + m + 1) + 2 * m
    }

    /// Number of `(k, n)` pairs with `0 < λ ≤ lambda`; above `10⁸` an upper
    /// bound `Λ(1 + ½ log(2K+1)) + K + 1` with `K = ⌊√Λ/2⌋` is returned.
    pub fn count(lambda: f64) -> f64 {
        if lambda > 1e8 {
            let k = (0.5 * lambda.sqrt()).floor();
            return lambda * (1.0 + 0.5 * (2.0 * k + 1.0).ln()) + k + 1.0;
        }
        let mut total = 0u64;
        let mut k = 0u64;
        while (4 * k * (k + 1)) as f64 <= lambda {
            let free = lambda - (4 * k * (k + 1)) as f64;
            let m_max = (free / (4 * k + 2) as f64).floor() as u64;
            total += 2 * m_max + 1;
            k += 1;
        }
        total.saturating_sub(1) as f64
    }

    /// All non-zero eigenvalues `≤ lambda_max`, one entry per `(k, n)` pair, sorted.
    pub fn enumerate(lambda_max: u64) -> Vec<(u64, u64, i64)> {
        let mut out = Vec::new();
        let mut k = 0u64;
        while 4 * k * (k + 1) <= lambda_max {
            let mut m = 0u64;
            loop {
                let lam = 4 * k * (k + m + 1) + 2 * m;
                if lam > lambda_max {
                    break;
                }
                if lam > 0 {
                    out.push((lam, k, m as i64));
                    if m > 0 {
                        out.push((lam, k, -(m as i64)));
                    }
                }
                m += 1;
            }
            k += 1;
        }
        out.sort();
        out
    }
}

impl Default for Su2Spectrum {
    fn default() -> Self {
        Self { multiplicity: 1 }
    }
}

impl SpectralModel for Su2Spectrum {
    fn id(&self) -> &'static str {
        "su2-spectrum"
    }

    fn dims(&self) -> Dims {
        Dims { d: 4.0, d_prime: 3.0, d_dprime: 4.0 }
    }

    fn counting_bound(&self, lambda: f64) -> Option<f64> {
        Some(Self::count(lambda) * self.multiplicity as f64)
    }

    fn eigen_data(&self, n_modes: usize) -> Result<Vec<EigenMode>> {
        let per = self.multiplicity as usize;
        // pair count up to Λ grows like Λ log Λ; double until enough
        let mut lmax = 16u64;
        let pairs = loop {
            let p = Self::enumerate(lmax);
            if p.len() * per >= n_modes {
                break p;
            }
            lmax *= 2;
        };
        let mut modes: Vec<EigenMode> = pairs
            .iter()
            .flat_map(|&(lam, _, _)| std::iter::repeat_n(lam, per))
            .take(n_modes)
            .enumerate()
            .map(|(j, lam)| EigenMode { index: j + 1, lambda: lam as f64, multiplicity: 1, evaluator: None })
            .collect();
        super::set_multiplicities(&mut modes);
        Ok(modes)
    }

    fn distance(&self, _x: &StatePoint, _y: &StatePoint) -> f64 {
        f64::NAN
    }

    fn contains(&self, _x: &StatePoint) -> bool {
        false
    }

    fn invariant_quantile(&self, _u: f64) -> Result<StatePoint> {
        Err(capability("su2-spectrum: no state space representation"))
    }

    fn sample_invariant(&self, _rng: &mut StreamRng) -> Result<StatePoint> {
        Err(capability("su2-spectrum: no state space representation"))
    }

    fn advance(&self, _x: &StatePoint, _d: f64, _c: &StepControl, _rng: &mut StreamRng) -> Result<StatePoint> {
        Err(capability("su2-spectrum: path simulation is not available"))
    }

    fn lipschitz(&self, _mode: &EigenMode) -> Result<f64> {
        Err(capability("su2-spectrum: no eigenfunction evaluation"))
    }

    fn ot_geometry(&self) -> OtGeometry {
        OtGeometry::Unsupported
    }

    fn can_simulate(&self) -> bool {
        false
    }
}
