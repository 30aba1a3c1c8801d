//! Exact transportation solver: primal network simplex on the complete
//! bipartite graph with an artificial root, block-search pricing and the
//! strongly-feasible leaving-arc rule.

use serde::Serialize;

use super::OTResult;
use crate::error::{input, Error, Result};

const NONE: usize = usize::MAX;

/// Sparse optimal coupling `π_{ij}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub rows: usize,
    pub cols: usize,
    /// `(i, j, mass)` with positive mass.
    pub entries: Vec<(usize, usize, f64)>,
}

impl Coupling {
    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.rows];
        for &(i, _, m) in &self.entries {
            s[i] += m;
        }
        s
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for &(_, j, m) in &self.entries {
            s[j] += m;
        }
        s
    }

    /// `i,j,mass` rows for debugging dumps.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "i,j,mass")?;
        for (i, j, m) in &self.entries {
            writeln!(out, "{i},{j},{m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportSolution {
    /// `Σ π_{ij} C_{ij}`.
    pub cost: f64,
    /// Duality gap plus the pricing tolerance times the total mass.
    pub bound: f64,
    pub pivots: usize,
    pub coupling: Coupling,
}

impl TransportSolution {
    /// Read the optimum as `W_p^p` when `C_{ij} = ρ(x_i, y_j)^p`.
    pub fn as_wasserstein(&self, p: f64) -> OTResult {
        OTResult::from_cost(p, self.cost, self.bound, "network-simplex")
    }
}

struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    art_cost: f64,
    flow: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    /// Whether `pred` points from the node to its parent.
    up: Vec<bool>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    children: Vec<Vec<usize>>,
}

impl Simplex<'_> {
    fn real_arcs(&self) -> usize {
        self.m * self.n
    }

    fn root(&self) -> usize {
        self.m + self.n
    }

    fn ends(&self, e: usize) -> (usize, usize) {
        let ne = self.real_arcs();
        if e < ne {
            (e / self.n, self.m + e % self.n)
        } else {
            let v = e - ne;
            if v < self.m {
                (v, self.root())
            } else {
                (self.root(), v)
            }
        }
    }

    fn arc_cost(&self, e: usize) -> f64 {
        if e < self.real_arcs() {
            self.cost[e]
        } else {
            self.art_cost
        }
    }

    fn reduced(&self, e: usize) -> f64 {
        let (s, t) = self.ends(e);
        self.arc_cost(e) - self.pi[s] + self.pi[t]
    }

    fn refresh_subtree(&mut self, top: usize) {
        let mut stack = vec![top];
        while let Some(x) = stack.pop() {
            let p = self.parent[x];
            let c = self.arc_cost(self.pred[x]);
            self.depth[x] = self.depth[p] + 1;
            self.pi[x] = if self.up[x] { self.pi[p] + c } else { self.pi[p] - c };
            stack.extend(self.children[x].iter().copied());
        }
    }

    fn detach(&mut self, child: usize, parent: usize) {
        let list = &mut self.children[parent];
        if let Some(pos) = list.iter().position(|&c| c == child) {
            list.swap_remove(pos);
        }
    }

    fn pivot(&mut self, e_in: usize) -> Result<()> {
        let (first, second) = self.ends(e_in);
        let (mut a, mut b) = (first, second);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        let join = a;
        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut side = 0;
        let mut x = first;
        while x != join {
            let d = if self.up[x] { self.flow[self.pred[x]] } else { f64::INFINITY };
            if d < delta {
                delta = d;
                u_out = x;
                side = 1;
            }
            x = self.parent[x];
        }
        x = second;
        while x != join {
            let d = if self.up[x] { f64::INFINITY } else { self.flow[self.pred[x]] };
            if d <= delta {
                delta = d;
                u_out = x;
                side = 2;
            }
            x = self.parent[x];
        }
        if u_out == NONE {
            return Err(input("unbounded transportation problem"));
        }
        if delta > 0.0 {
            self.flow[e_in] += delta;
            let mut x = first;
            while x != join {
                let e = self.pred[x];
                self.flow[e] += if self.up[x] { -delta } else { delta };
                x = self.parent[x];
            }
            x = second;
            while x != join {
                let e = self.pred[x];
                self.flow[e] += if self.up[x] { delta } else { -delta };
                x = self.parent[x];
            }
        }
        let (u_in, v_in) = if side == 1 { (first, second) } else { (second, first) };
        // path u_in → … → u_out is re-hung below v_in with its arcs reversed
        let mut path = vec![u_in];
        while *path.last().unwrap() != u_out {
            path.push(self.parent[*path.last().unwrap()]);
        }
        let old_pred: Vec<usize> = path.iter().map(|&x| self.pred[x]).collect();
        let old_up: Vec<bool> = path.iter().map(|&x| self.up[x]).collect();
        self.detach(u_out, self.parent[u_out]);
        for w in path.windows(2) {
            self.detach(w[0], w[1]);
            self.children[w[0]].push(w[1]);
        }
        self.children[v_in].push(u_in);
        self.parent[u_in] = v_in;
        self.pred[u_in] = e_in;
        self.up[u_in] = self.ends(e_in).0 == u_in;
        for i in 1..path.len() {
            self.parent[path[i]] = path[i - 1];
            self.pred[path[i]] = old_pred[i - 1];
            self.up[path[i]] = !old_up[i - 1];
        }
        self.refresh_subtree(u_in);
        Ok(())
    }
}

/// Solve `min Σ π_{ij} C_{ij}` over couplings of `a` and `b`; `cost` is
/// row-major `a.len() × b.len()`.
pub fn w2_discrete_exact(a: &[f64], b: &[f64], cost: &[f64]) -> Result<TransportSolution> {
    let (m, n) = (a.len(), b.len());
    if m == 0 || n == 0 {
        return Err(input("empty marginal"));
    }
    if m > 2000 || n > 2000 {
        return Err(input(format!("{m}×{n} exceeds the 2000×2000 oracle scale")));
    }
    if cost.len() != m * n {
        return Err(input(format!("cost matrix has {} entries, expected {}", cost.len(), m * n)));
    }
    if a.iter().chain(b).any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(input("weights must be finite and non-negative"));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(input("cost entries must be finite"));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > 1e-9 * sa.max(sb) || sa <= 0.0 {
        return Err(input(format!("marginals carry different mass ({sa} vs {sb})")));
    }
    // absorb rounding-level imbalance into b
    let scale = sa / sb;
    let cmax = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let nodes = m + n + 1;
    let ne = m * n;
    let art_cost = (cmax + 1.0) * nodes as f64;
    let root = m + n;
    let mut s = Simplex {
        m,
        n,
        cost,
        art_cost,
        flow: vec![0.0; ne + m + n],
        parent: vec![root; nodes],
        pred: (0..nodes).map(|v| ne + v).collect(),
        up: (0..nodes).map(|v| v < m).collect(),
        depth: vec![1; nodes],
        pi: vec![0.0; nodes],
        children: vec![Vec::new(); nodes],
    };
    s.parent[root] = NONE;
    s.depth[root] = 0;
    s.children[root] = (0..m + n).collect();
    for (i, &w) in a.iter().enumerate() {
        s.flow[ne + i] = w;
        s.pi[i] = art_cost;
    }
    for (j, &w) in b.iter().enumerate() {
        s.flow[ne + m + j] = w * scale;
        s.pi[m + j] = -art_cost;
    }

    let tol = 1e-12 * (cmax + 1.0);
    let block = ((ne as f64).sqrt() as usize).max(10);
    let mut next = 0usize;
    let mut pivots = 0usize;
    let max_pivots = 50 * ne + 1000;
    loop {
        let mut best = -tol;
        let mut enter = NONE;
        let mut scanned = 0;
        while scanned < ne {
            let stop = (scanned + block).min(ne);
            while scanned < stop {
                let e = next;
                next = if next + 1 == ne { 0 } else { next + 1 };
                scanned += 1;
                let rc = s.reduced(e);
                if rc < best {
                    best = rc;
                    enter = e;
                }
            }
            if enter != NONE {
                break;
            }
        }
        if enter == NONE {
            break;
        }
        s.pivot(enter)?;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::NotConverged { iterations: pivots, residual: best.abs() });
        }
    }

    let leftover: f64 = s.flow[ne..].iter().sum();
    if leftover > 1e-9 * sa {
        return Err(input(format!("infeasible marginals: {leftover} mass left on artificial arcs")));
    }
    let mut total = 0.0;
    let mut entries = Vec::new();
    for (e, &c) in cost.iter().enumerate() {
        let f = s.flow[e];
        if f > 0.0 {
            total += f * c;
            entries.push((e / n, e % n, f));
        }
    }
    let dual: f64 =
        (0..m).map(|i| a[i] * s.pi[i]).sum::<f64>() - (0..n).map(|j| b[j] * scale * s.pi[m + j]).sum::<f64>();
    let bound = (total - dual).abs() + tol * sa + 1e-12 * total.abs();
    Ok(TransportSolution { cost: total, bound, pivots, coupling: Coupling { rows: m, cols: n, entries } })
}
