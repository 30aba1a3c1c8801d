//! Rate regimes in exact rational arithmetic.

use std::fmt;

use num_rational::Rational64;
use serde::{Serialize, Serializer};

pub type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn ser_q<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_q<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_str("inf"),
    }
}

/// Decay law of a Wasserstein moment in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    /// `t^{−1}`.
    Parametric,
    /// `t^{−1} log t`.
    CriticalLog,
    /// `t^{−e}` with `e > 0`.
    Polynomial(Q),
}

impl Rate {
    /// Exponent `e` of the power of `t` (1 for both `t^{−1}` laws).
    pub fn exponent(&self) -> Q {
        match *self {
            Rate::Parametric | Rate::CriticalLog => q(1),
            Rate::Polynomial(e) => e,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Parametric => write!(f, "t^-1"),
            Rate::CriticalLog => write!(f, "t^-1 log t"),
            Rate::Polynomial(e) => write!(f, "t^-({e})"),
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `(d, d′)` dimensions, Bernstein index `α` and moment orders `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeInputs {
    #[serde(serialize_with = "ser_q")]
    pub d: Q,
    #[serde(serialize_with = "ser_q")]
    pub d_prime: Q,
    #[serde(serialize_with = "ser_q")]
    pub alpha: Q,
    #[serde(serialize_with = "ser_q")]
    pub p: Q,
    #[serde(serialize_with = "ser_q")]
    pub q: Q,
}

impl RegimeInputs {
    pub fn new(d: Q, d_prime: Q, alpha: Q, p: Q, q: Q) -> Self {
        Self { d, d_prime, alpha, p, q }
    }

    /// Rational approximations of floating inputs (exact for dyadic and short decimals).
    pub fn from_f64(d: f64, d_prime: f64, alpha: f64, p: f64, q: f64) -> Self {
        let r = |x: f64| Q::approximate_float(x).unwrap_or_default();
        Self::new(r(d), r(d_prime), r(alpha), r(p), r(q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegime {
    pub inputs: RegimeInputs,
    /// Law of `E[W₂²]`.
    pub w2: Rate,
    /// Law of `(E[W_{2p}^{2q}])^{1/q}`.
    pub w2p_2q: Rate,
    /// `None` when the denominator of `q_α` is not positive (`q_α = ∞`).
    #[serde(serialize_with = "ser_opt_q")]
    pub q_alpha: Option<Q>,
    #[serde(serialize_with = "ser_q")]
    pub gamma: Q,
    pub alpha_threshold: f64,
    /// Whether `η_Z^B` is finite, i.e. `d′ < 2(1+α)`.
    pub eta_finite: bool,
}

/// `q_α = 2d / (2d + d′ − 2 − 2α)⁺`.
pub fn q_alpha(d: Q, d_prime: Q, alpha: Q) -> Option<Q> {
    let den = q(2) * d + d_prime - q(2) - q(2) * alpha;
    (den > q(0)).then(|| q(2) * d / den)
}

/// `γ_{α,p,q} = d′/2 + (d/2)(2 − p⁻¹ − q⁻¹) − α − 1`.
pub fn gamma(d: Q, d_prime: Q, alpha: Q, p: Q, qq: Q) -> Q {
    d_prime / q(2) + d / q(2) * (q(2) - p.recip() - qq.recip()) - alpha - q(1)
}

/// `α(d,d′) = ¼(√((2+d−d′)² + 4d(d+d′−2)) + d′ − d − 2)`.
pub fn alpha_threshold(d: f64, d_prime: f64) -> f64 {
    0.25 * (((2.0 + d - d_prime).powi(2) + 4.0 * d * (d + d_prime - 2.0)).sqrt() + d_prime - d - 2.0)
}

/// Integer part `i(q)`.
pub fn integer_part(x: Q) -> i64 {
    x.floor().to_integer()
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Classify both decay laws. Deterministic in its inputs and free of rounding.
pub fn regime(inputs: RegimeInputs) -> RateRegime {
    let RegimeInputs { d, d_prime, alpha, p, q: qq } = inputs;
    let critical = q(2) * (q(1) + alpha);
    let w2 = if d_prime < critical {
        Rate::Parametric
    } else if d_prime == critical {
        Rate::CriticalLog
    } else {
        Rate::Polynomial(q(2) / (d_prime - q(2) * alpha))
    };
    let g = gamma(d, d_prime, alpha, p, qq);
    let w2p_2q = if g < q(0) {
        Rate::Parametric
    } else if g == q(0) {
        Rate::CriticalLog
    } else {
        Rate::Polynomial((q(1) + g).recip())
    };
    RateRegime {
        inputs,
        w2,
        w2p_2q,
        q_alpha: q_alpha(d, d_prime, alpha),
        gamma: g,
        alpha_threshold: alpha_threshold(to_f64(d), to_f64(d_prime)),
        eta_finite: d_prime < critical,
    }
}
