//! Oracles shared by the integration tests. Nothing here calls the code under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use empirw_core::predictions::{Rate, RegimeInputs, Q};

pub fn r(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// One classification read off the theorem statements and per-model tables.
pub struct Golden {
    pub label: &'static str,
    pub inputs: RegimeInputs,
    pub q_alpha: Option<Q>,
    pub gamma: Q,
    pub w2: Rate,
    pub w2p_2q: Rate,
}

#[allow(clippy::too_many_arguments)]
fn g(
    label: &'static str,
    d: Q,
    dp: Q,
    a: Q,
    p: Q,
    q: Q,
    q_alpha: Option<Q>,
    gamma: Q,
    w2: Rate,
    w2p_2q: Rate,
) -> Golden {
    Golden { label, inputs: RegimeInputs::new(d, dp, a, p, q), q_alpha, gamma, w2, w2p_2q }
}

/// Tori with `α = 1` over a spread of `(p, q)`, the conditioned process on
/// `n`-dimensional domains, Wright–Fisher with `a∨b ∈ {1, 3/2}` and SU(2).
pub fn golden_cases() -> Vec<Golden> {
    vec![
        g("torus n=1", r(1, 1), r(1, 1), r(1, 1), r(1, 1), r(1, 1), None, r(-3, 2), Rate::Parametric, Rate::Parametric),
        g("torus n=1", r(1, 1), r(1, 1), r(1, 1), r(2, 1), r(1, 1), None, r(-5, 4), Rate::Parametric, Rate::Parametric),
        g("torus n=1", r(1, 1), r(1, 1), r(1, 1), r(2, 1), r(2, 1), None, r(-1, 1), Rate::Parametric, Rate::Parametric),
        g("torus n=1", r(1, 1), r(1, 1), r(1, 1), r(3, 2), r(3, 1), None, r(-1, 1), Rate::Parametric, Rate::Parametric),
        g(
            "torus n=1",
            r(1, 1),
            r(1, 1),
            r(1, 1),
            r(4, 3),
            r(3, 2),
            None,
            r(-29, 24),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "torus n=1",
            r(1, 1),
            r(1, 1),
            r(1, 1),
            r(5, 4),
            r(4, 1),
            None,
            r(-41, 40),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g("torus n=1", r(1, 1), r(1, 1), r(1, 1), r(3, 1), r(3, 2), None, r(-1, 1), Rate::Parametric, Rate::Parametric),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(2, 1)),
            r(-1, 1),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(2, 1),
            r(1, 1),
            Some(r(2, 1)),
            r(-1, 2),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(2, 1)),
            r(0, 1),
            Rate::Parametric,
            Rate::CriticalLog,
        ),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(3, 2),
            r(3, 1),
            Some(r(2, 1)),
            r(0, 1),
            Rate::Parametric,
            Rate::CriticalLog,
        ),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(4, 3),
            r(3, 2),
            Some(r(2, 1)),
            r(-5, 12),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(5, 4),
            r(4, 1),
            Some(r(2, 1)),
            r(-1, 20),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "torus n=2",
            r(2, 1),
            r(2, 1),
            r(1, 1),
            r(3, 1),
            r(3, 2),
            Some(r(2, 1)),
            r(0, 1),
            Rate::Parametric,
            Rate::CriticalLog,
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(6, 5)),
            r(-1, 2),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(2, 1),
            r(1, 1),
            Some(r(6, 5)),
            r(1, 4),
            Rate::Parametric,
            Rate::Polynomial(r(4, 5)),
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(6, 5)),
            r(1, 1),
            Rate::Parametric,
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(3, 2),
            r(3, 1),
            Some(r(6, 5)),
            r(1, 1),
            Rate::Parametric,
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(4, 3),
            r(3, 2),
            Some(r(6, 5)),
            r(3, 8),
            Rate::Parametric,
            Rate::Polynomial(r(8, 11)),
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(5, 4),
            r(4, 1),
            Some(r(6, 5)),
            r(37, 40),
            Rate::Parametric,
            Rate::Polynomial(r(40, 77)),
        ),
        g(
            "torus n=3",
            r(3, 1),
            r(3, 1),
            r(1, 1),
            r(3, 1),
            r(3, 2),
            Some(r(6, 5)),
            r(1, 1),
            Rate::Parametric,
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(1, 1)),
            r(0, 1),
            Rate::CriticalLog,
            Rate::CriticalLog,
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(2, 1),
            r(1, 1),
            Some(r(1, 1)),
            r(1, 1),
            Rate::CriticalLog,
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(1, 1)),
            r(2, 1),
            Rate::CriticalLog,
            Rate::Polynomial(r(1, 3)),
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(3, 2),
            r(3, 1),
            Some(r(1, 1)),
            r(2, 1),
            Rate::CriticalLog,
            Rate::Polynomial(r(1, 3)),
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(4, 3),
            r(3, 2),
            Some(r(1, 1)),
            r(7, 6),
            Rate::CriticalLog,
            Rate::Polynomial(r(6, 13)),
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(5, 4),
            r(4, 1),
            Some(r(1, 1)),
            r(19, 10),
            Rate::CriticalLog,
            Rate::Polynomial(r(10, 29)),
        ),
        g(
            "torus n=4",
            r(4, 1),
            r(4, 1),
            r(1, 1),
            r(3, 1),
            r(3, 2),
            Some(r(1, 1)),
            r(2, 1),
            Rate::CriticalLog,
            Rate::Polynomial(r(1, 3)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(10, 11)),
            r(1, 2),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(2, 3)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(2, 1),
            r(1, 1),
            Some(r(10, 11)),
            r(7, 4),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(4, 11)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(10, 11)),
            r(3, 1),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(1, 4)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(3, 2),
            r(3, 1),
            Some(r(10, 11)),
            r(3, 1),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(1, 4)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(4, 3),
            r(3, 2),
            Some(r(10, 11)),
            r(47, 24),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(24, 71)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(5, 4),
            r(4, 1),
            Some(r(10, 11)),
            r(23, 8),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(8, 31)),
        ),
        g(
            "torus n=5",
            r(5, 1),
            r(5, 1),
            r(1, 1),
            r(3, 1),
            r(3, 2),
            Some(r(10, 11)),
            r(3, 1),
            Rate::Polynomial(r(2, 3)),
            Rate::Polynomial(r(1, 4)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(6, 7)),
            r(1, 1),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(2, 1),
            r(1, 1),
            Some(r(6, 7)),
            r(5, 2),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(2, 7)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(6, 7)),
            r(4, 1),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(1, 5)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(3, 2),
            r(3, 1),
            Some(r(6, 7)),
            r(4, 1),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(1, 5)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(4, 3),
            r(3, 2),
            Some(r(6, 7)),
            r(11, 4),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(4, 15)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(5, 4),
            r(4, 1),
            Some(r(6, 7)),
            r(77, 20),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(20, 97)),
        ),
        g(
            "torus n=6",
            r(6, 1),
            r(6, 1),
            r(1, 1),
            r(3, 1),
            r(3, 2),
            Some(r(6, 7)),
            r(4, 1),
            Rate::Polynomial(r(1, 2)),
            Rate::Polynomial(r(1, 5)),
        ),
        g(
            "conditioned n=1",
            r(3, 1),
            r(1, 1),
            r(1, 2),
            r(1, 1),
            r(1, 1),
            Some(r(3, 2)),
            r(-1, 1),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "conditioned n=1",
            r(3, 1),
            r(1, 1),
            r(3, 4),
            r(1, 1),
            r(1, 1),
            Some(r(12, 7)),
            r(-5, 4),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "conditioned n=2",
            r(4, 1),
            r(2, 1),
            r(1, 2),
            r(1, 1),
            r(1, 1),
            Some(r(8, 7)),
            r(-1, 2),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "conditioned n=2",
            r(4, 1),
            r(2, 1),
            r(3, 4),
            r(1, 1),
            r(1, 1),
            Some(r(16, 13)),
            r(-3, 4),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "conditioned n=3",
            r(5, 1),
            r(3, 1),
            r(1, 2),
            r(1, 1),
            r(1, 1),
            Some(r(1, 1)),
            r(0, 1),
            Rate::CriticalLog,
            Rate::CriticalLog,
        ),
        g(
            "conditioned n=3",
            r(5, 1),
            r(3, 1),
            r(3, 4),
            r(1, 1),
            r(1, 1),
            Some(r(20, 19)),
            r(-1, 4),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "wf a∨b=1",
            r(4, 1),
            r(2, 1),
            r(1, 2),
            r(1, 1),
            r(1, 1),
            Some(r(8, 7)),
            r(-1, 2),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "wf a∨b=1",
            r(4, 1),
            r(2, 1),
            r(1, 2),
            r(2, 1),
            r(2, 1),
            Some(r(8, 7)),
            r(3, 2),
            Rate::Parametric,
            Rate::Polynomial(r(2, 5)),
        ),
        g(
            "wf a∨b=1",
            r(4, 1),
            r(2, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(4, 3)),
            r(-1, 1),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "wf a∨b=1",
            r(4, 1),
            r(2, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(4, 3)),
            r(1, 1),
            Rate::Parametric,
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "wf a∨b=3/2",
            r(6, 1),
            r(2, 1),
            r(1, 2),
            r(1, 1),
            r(1, 1),
            Some(r(12, 11)),
            r(-1, 2),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "wf a∨b=3/2",
            r(6, 1),
            r(2, 1),
            r(1, 2),
            r(2, 1),
            r(2, 1),
            Some(r(12, 11)),
            r(5, 2),
            Rate::Parametric,
            Rate::Polynomial(r(2, 7)),
        ),
        g(
            "wf a∨b=3/2",
            r(6, 1),
            r(2, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(6, 5)),
            r(-1, 1),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "wf a∨b=3/2",
            r(6, 1),
            r(2, 1),
            r(1, 1),
            r(2, 1),
            r(2, 1),
            Some(r(6, 5)),
            r(2, 1),
            Rate::Parametric,
            Rate::Polynomial(r(1, 3)),
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(1, 4),
            r(1, 1),
            r(1, 1),
            Some(r(16, 17)),
            r(1, 4),
            Rate::Polynomial(r(4, 5)),
            Rate::Polynomial(r(4, 5)),
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(1, 4),
            r(2, 1),
            r(1, 1),
            Some(r(16, 17)),
            r(5, 4),
            Rate::Polynomial(r(4, 5)),
            Rate::Polynomial(r(4, 9)),
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(1, 2),
            r(1, 1),
            r(1, 1),
            Some(r(1, 1)),
            r(0, 1),
            Rate::CriticalLog,
            Rate::CriticalLog,
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(1, 2),
            r(2, 1),
            r(1, 1),
            Some(r(1, 1)),
            r(1, 1),
            Rate::CriticalLog,
            Rate::Polynomial(r(1, 2)),
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(3, 4),
            r(1, 1),
            r(1, 1),
            Some(r(16, 15)),
            r(-1, 4),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(3, 4),
            r(2, 1),
            r(1, 1),
            Some(r(16, 15)),
            r(3, 4),
            Rate::Parametric,
            Rate::Polynomial(r(4, 7)),
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(1, 1),
            r(1, 1),
            r(1, 1),
            Some(r(8, 7)),
            r(-1, 2),
            Rate::Parametric,
            Rate::Parametric,
        ),
        g(
            "su2",
            r(4, 1),
            r(3, 1),
            r(1, 1),
            r(2, 1),
            r(1, 1),
            Some(r(8, 7)),
            r(1, 2),
            Rate::Parametric,
            Rate::Polynomial(r(2, 3)),
        ),
    ]
}

/// Law of `(E W_{2p}^{2q})^{1/q}` on the `n`-torus with `B(λ) = λ`, read
/// directly off the case split by dimension. `None` where no case applies
/// (for `n = 3` the split leaves `p ≥ 3/2, q ≤ 3p/(5p−3)` open).
pub fn torus_statement(n: i64, p: Q, q: Q) -> Option<Rate> {
    let one = r(1, 1);
    let s3 = || Rate::Polynomial(r(2, 1) / (Q::from_integer(n) * (r(3, 1) - p.recip() - q.recip()) - r(2, 1)));
    Some(match n {
        1 => Rate::Parametric,
        2 => {
            if p == one || q < p / (p - one) {
                Rate::Parametric
            } else if q == p / (p - one) {
                Rate::CriticalLog
            } else {
                s3()
            }
        }
        3 => {
            let edge = r(3, 1) * p / (r(5, 1) * p - r(3, 1));
            if p < r(3, 2) && q < edge {
                Rate::Parametric
            } else if p < r(3, 2) && q == edge {
                Rate::CriticalLog
            } else if q > edge {
                s3()
            } else {
                return None;
            }
        }
        4 if p == one && q == one => Rate::CriticalLog,
        _ => s3(),
    })
}

/// The same law for general `α` from the comparison of `n(3 − p⁻¹ − q⁻¹)` with `2(1+α)`.
pub fn torus_by_alpha(n: i64, alpha: Q, p: Q, q: Q) -> Rate {
    let s = Q::from_integer(n) * (r(3, 1) - p.recip() - q.recip());
    let crit = r(2, 1) * (r(1, 1) + alpha);
    if s < crit {
        Rate::Parametric
    } else if s == crit {
        Rate::CriticalLog
    } else {
        Rate::Polynomial(r(2, 1) / (s - r(2, 1) * alpha))
    }
}

pub fn torus_w2(n: i64) -> Rate {
    match n {
        ..=3 => Rate::Parametric,
        4 => Rate::CriticalLog,
        _ => Rate::Polynomial(r(2, n - 2)),
    }
}

/// `(n, p, q)` for `n ≤ 7` over a spread of orders, including the boundary
/// exponents `p/(p−1)` and `3p/(5p−3)` where they are at least 1.
pub fn torus_grid() -> Vec<(i64, Q, Q)> {
    let orders: Vec<Q> =
        [(1, 1), (5, 4), (4, 3), (7, 5), (3, 2), (2, 1), (3, 1), (6, 1)].iter().map(|&(a, b)| r(a, b)).collect();
    let mut out = Vec::new();
    for n in 1..=7 {
        for &p in &orders {
            let mut qs = orders.clone();
            if p < r(3, 2) {
                qs.push(r(3, 1) * p / (r(5, 1) * p - r(3, 1)));
            }
            if p > r(1, 1) {
                qs.push(p / (p - r(1, 1)));
            }
            out.extend(qs.into_iter().filter(|q| *q >= r(1, 1)).map(|q| (n, p, q)));
        }
    }
    out
}

/// Minimum assignment cost by dynamic programming over column subsets,
/// divided by `n` (uniform marginals).
pub fn assignment_dp(cost: &[f64], n: usize) -> f64 {
    let mut best = vec![f64::INFINITY; 1 << n];
    best[0] = 0.0;
    for mask in 0..(1usize << n) {
        let row = mask.count_ones() as usize;
        if row == n || !best[mask].is_finite() {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                best[next] = best[next].min(best[mask] + cost[row * n + j]);
            }
        }
    }
    best[(1 << n) - 1] / n as f64
}

/// `2π⁴/45 = 4 ζ(4)`: each frequency `k` carries two modes with `λ = k²`.
pub fn eta_circle_still() -> f64 {
    2.0 * PI.powi(4) / 45.0
}

/// `Σ_k 4/(k²(k² + c²))` in closed form via partial fractions.
pub fn eta_circle_drift(c: f64) -> f64 {
    let zeta2 = PI * PI / 6.0;
    let shifted = PI / (PI * c).tanh() / (2.0 * c) - 1.0 / (2.0 * c * c);
    4.0 / (c * c) * (zeta2 - shifted)
}

/// `Σ_k 4/k³ = 4ζ(3)` for `B(λ) = √λ`.
pub fn eta_circle_stable_half() -> f64 {
    // Apéry's constant by direct summation with an integral tail correction
    let n = 100_000;
    let head: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64).powi(3)).sum();
    let m = n as f64 + 0.5;
    4.0 * (head + 1.0 / (2.0 * m * m))
}
