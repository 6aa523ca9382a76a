//! Dense linear programs `max cᵀx  s.t.  a_r·x (≤|≥) b_r,  l ≤ x ≤ u`.
//!
//! The solver works on the dual in standard form,
//!
//! ```text
//! min  Σ_r b_r λ_r + Σ_e u_e μ⁺_e - Σ_e l_e μ⁻_e
//! s.t. Σ_r λ_r a_r + μ⁺ - μ⁻ = c,   λ, μ⁺, μ⁻ ≥ 0,
//! ```
//!
//! with a revised primal simplex on an explicit `n × n` basis inverse
//! (`n` = number of primal variables). Columns enter by Dantzig's rule
//! (most negative reduced cost); after a run of degenerate pivots the solver
//! switches to Bland's rule until the objective moves again, which rules out
//! cycling. The starting basis
//! is one box column per variable, so no phase 1 is needed, and appending a
//! constraint only appends a column: the current basis stays feasible and
//! re-solving warm-starts. The primal solution is the simplex multiplier
//! vector `y = c_Bᵀ B⁻¹`.

use crate::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-11;
pub const OPTIMALITY_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;
/// Consecutive degenerate pivots after which Bland's rule takes over.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// Objective `c` with the box `-bound ≤ x_e ≤ bound` and no constraints.
    pub fn boxed(objective: Vec<f64>, bound: f64) -> Self {
        let n = objective.len();
        Self { objective, lower: vec![-bound; n], upper: vec![bound; n], constraints: Vec::new() }
    }

    pub fn with_constraint(mut self, coefficients: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        self.constraints.push(Constraint { coefficients, sense, rhs });
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// `cᵀx` at the returned solution.
    pub value: f64,
    pub solution: Vec<f64>,
    /// Objective of the dual certificate; `|value - dual_value|` is the gap.
    pub dual_value: f64,
    /// Dual weight `λ_r ≥ 0` of every constraint.
    pub constraint_weights: Vec<f64>,
    /// `μ⁺_e - μ⁻_e` for every variable.
    pub box_weights: Vec<f64>,
    pub pivots: usize,
}

/// Solves `lp` from scratch.
pub fn lp_maximize(lp: &LinearProgram) -> Result<LpSolution> {
    let mut s = DualSimplex::new(&lp.objective, &lp.lower, &lp.upper)?;
    for c in &lp.constraints {
        s.add_constraint(&c.coefficients, c.sense, c.rhs)?;
    }
    s.solve()
}

#[derive(Debug, Clone, Copy)]
enum Column {
    /// `+e_var`, cost `u_var`.
    Upper(usize),
    /// `-e_var`, cost `-l_var`.
    Lower(usize),
    /// Stored row `r` of `cuts`, negated for `≥` constraints.
    Cut(usize),
}

/// Warm-startable simplex state; see the module docs.
#[derive(Debug, Clone)]
pub struct DualSimplex {
    n: usize,
    rhs: Vec<f64>,
    columns: Vec<Column>,
    costs: Vec<f64>,
    cuts: Vec<f64>,
    cut_signs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
}

impl DualSimplex {
    pub fn new(objective: &[f64], lower: &[f64], upper: &[f64]) -> Result<Self> {
        let n = objective.len();
        if n == 0 {
            return Err(Error::InvalidArgument("linear program needs at least one variable".into()));
        }
        for (context, v) in [("lower bounds", lower), ("upper bounds", upper)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { context, expected: n, got: v.len() });
            }
        }
        if objective.iter().chain(lower).chain(upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("objective and box bounds must be finite".into()));
        }
        let mut columns = Vec::with_capacity(2 * n);
        let mut costs = Vec::with_capacity(2 * n);
        for e in 0..n {
            columns.push(Column::Upper(e));
            costs.push(upper[e]);
            columns.push(Column::Lower(e));
            costs.push(-lower[e]);
        }
        let mut basis = Vec::with_capacity(n);
        let mut is_basic = vec![false; 2 * n];
        let mut binv = vec![0.0; n * n];
        let mut xb = Vec::with_capacity(n);
        for (e, &c) in objective.iter().enumerate() {
            let j = if c >= 0.0 { 2 * e } else { 2 * e + 1 };
            basis.push(j);
            is_basic[j] = true;
            binv[e * n + e] = if c >= 0.0 { 1.0 } else { -1.0 };
            xb.push(c.abs());
        }
        Ok(Self {
            n,
            rhs: objective.to_vec(),
            columns,
            costs,
            cuts: Vec::new(),
            cut_signs: Vec::new(),
            basis,
            is_basic,
            binv,
            xb,
            since_refactor: 0,
            pivots: 0,
        })
    }

    pub fn num_constraints(&self) -> usize {
        self.cut_signs.len()
    }

    pub fn add_constraint(&mut self, coefficients: &[f64], sense: Sense, rhs: f64) -> Result<()> {
        if coefficients.len() != self.n {
            return Err(Error::DimensionMismatch { context: "constraint", expected: self.n, got: coefficients.len() });
        }
        if !rhs.is_finite() || coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("constraint data must be finite".into()));
        }
        let sign = match sense {
            Sense::AtMost => 1.0,
            Sense::AtLeast => -1.0,
        };
        let r = self.cut_signs.len();
        self.cuts.extend(coefficients.iter().map(|a| sign * a));
        self.cut_signs.push(sign);
        self.columns.push(Column::Cut(r));
        self.costs.push(sign * rhs);
        self.is_basic.push(false);
        Ok(())
    }

    fn cut(&self, r: usize) -> &[f64] {
        &self.cuts[r * self.n..(r + 1) * self.n]
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        match self.columns[j] {
            Column::Upper(e) => y[e],
            Column::Lower(e) => -y[e],
            Column::Cut(r) => self.cut(r).iter().zip(y).map(|(a, b)| a * b).sum(),
        }
    }

    fn dense_column(&self, j: usize) -> Vec<f64> {
        match self.columns[j] {
            Column::Upper(e) => unit(self.n, e, 1.0),
            Column::Lower(e) => unit(self.n, e, -1.0),
            Column::Cut(r) => self.cut(r).to_vec(),
        }
    }

    /// `B⁻¹ A_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let n = self.n;
        match self.columns[j] {
            Column::Upper(e) | Column::Lower(e) => {
                let s = if matches!(self.columns[j], Column::Upper(_)) { 1.0 } else { -1.0 };
                (0..n).map(|i| s * self.binv[i * n + e]).collect()
            }
            Column::Cut(r) => {
                let a = self.cut(r);
                (0..n).map(|i| self.binv[i * n..(i + 1) * n].iter().zip(a).map(|(b, x)| b * x).sum()).collect()
            }
        }
    }

    /// Simplex multipliers `y = c_Bᵀ B⁻¹`.
    fn multipliers(&self) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = self.costs[j];
            if c != 0.0 {
                for (yk, b) in y.iter_mut().zip(&self.binv[i * n..(i + 1) * n]) {
                    *yk += c * b;
                }
            }
        }
        y
    }

    fn refactor(&mut self) -> Result<()> {
        let n = self.n;
        // Gauss-Jordan on [B | I] with partial pivoting.
        let mut b = vec![0.0; n * n];
        for (col, &j) in self.basis.iter().enumerate() {
            for (row, v) in self.dense_column(j).into_iter().enumerate() {
                b[row * n + col] = v;
            }
        }
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&a, &c| b[a * n + col].abs().total_cmp(&b[c * n + col].abs()))
                .expect("non-empty range");
            if b[piv * n + col].abs() < 1e-14 {
                return Err(Error::SingularBasis);
            }
            if piv != col {
                for k in 0..n {
                    b.swap(piv * n + k, col * n + k);
                    inv.swap(piv * n + k, col * n + k);
                }
            }
            let d = b[col * n + col];
            for k in 0..n {
                b[col * n + k] /= d;
                inv[col * n + k] /= d;
            }
            for row in 0..n {
                if row != col {
                    let f = b[row * n + col];
                    if f != 0.0 {
                        for k in 0..n {
                            b[row * n + k] -= f * b[col * n + k];
                            inv[row * n + k] -= f * inv[col * n + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.xb =
            (0..n).map(|i| self.binv[i * n..(i + 1) * n].iter().zip(&self.rhs).map(|(a, c)| a * c).sum()).collect();
        self.since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, r: usize, j: usize, alpha: &[f64]) {
        let n = self.n;
        let ar = alpha[r];
        let theta = self.xb[r] / ar;
        for k in 0..n {
            self.binv[r * n + k] /= ar;
        }
        let (head, rest) = self.binv.split_at_mut(r * n);
        let (row_r, tail) = rest.split_at_mut(n);
        for (i, row) in head.chunks_exact_mut(n).chain(tail.chunks_exact_mut(n)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = alpha[i];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(row_r.iter()) {
                    *v -= f * p;
                }
            }
        }
        for i in 0..n {
            if i != r {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        self.is_basic[self.basis[r]] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
        self.since_refactor += 1;
        self.pivots += 1;
    }

    fn pivot_cap(&self) -> usize {
        50 * (self.n + self.columns.len()) + 10_000
    }

    /// Runs the simplex to optimality from the current basis.
    pub fn solve(&mut self) -> Result<LpSolution> {
        let cap = self.pivot_cap();
        let start = self.pivots;
        let mut degenerate = 0;
        loop {
            if self.pivots - start > cap {
                return Err(Error::CycleGuard(cap));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let y = self.multipliers();
            let reduced = |j: usize| self.costs[j] - self.column_dot(j, &y);
            let entering = if degenerate >= DEGENERATE_RUN {
                // Bland: first improving column in index order.
                (0..self.columns.len()).find(|&j| !self.is_basic[j] && reduced(j) < -OPTIMALITY_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..self.columns.len() {
                    if !self.is_basic[j] {
                        let d = reduced(j);
                        if d < -OPTIMALITY_TOL && best.is_none_or(|(_, b)| d < b) {
                            best = Some((j, d));
                        }
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(j) = entering else {
                if self.since_refactor > 0 {
                    // Confirm optimality on a fresh factorization.
                    self.refactor()?;
                    let y = self.multipliers();
                    let still = (0..self.columns.len())
                        .any(|j| !self.is_basic[j] && self.costs[j] - self.column_dot(j, &y) < -OPTIMALITY_TOL);
                    if still {
                        continue;
                    }
                }
                return Ok(self.solution());
            };
            let alpha = self.ftran(j);
            let mut leave: Option<(usize, f64)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                if a > PIVOT_TOL {
                    let ratio = self.xb[i].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr);
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            // Unbounded dual ray: the primal is empty.
            let Some((r, ratio)) = leave else {
                return Err(Error::Infeasible);
            };
            if ratio <= PIVOT_TOL {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, j, &alpha);
        }
    }

    fn solution(&self) -> LpSolution {
        let y = self.multipliers();
        let value = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        let mut constraint_weights = vec![0.0; self.num_constraints()];
        let mut box_weights = vec![0.0; self.n];
        let mut dual_value = 0.0;
        for (i, &j) in self.basis.iter().enumerate() {
            let w = self.xb[i].max(0.0);
            dual_value += self.costs[j] * w;
            match self.columns[j] {
                Column::Upper(e) => box_weights[e] += w,
                Column::Lower(e) => box_weights[e] -= w,
                Column::Cut(r) => constraint_weights[r] = w,
            }
        }
        LpSolution { value, solution: y, dual_value, constraint_weights, box_weights, pivots: self.pivots }
    }
}

fn unit(n: usize, e: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[e] = s;
    v
}
