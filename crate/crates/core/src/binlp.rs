//! Exact solver for small 0-1 linear programs.
//!
//! `maximize c·x subject to A x <= b, x ∈ {0,1}^n` is solved by depth-first
//! branch-and-bound. Each node runs bound propagation on the constraints and
//! then a dense two-phase simplex with Bland's rule on the relaxation
//! `0 <= x <= 1`. The search branches on the most fractional variable (lowest
//! index on ties) and explores the 1-branch first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feasibility and pivoting tolerance.
pub const TOLERANCE: f64 = 1e-9;

/// `coeffs · x <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryLinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    /// Row x column layout of the variables, for extraction problems.
    grid: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlpSolution {
    pub assignment: Vec<bool>,
    pub objective_value: f64,
    pub status: BlpStatus,
    /// Branch-and-bound nodes visited.
    pub nodes: usize,
}

impl BinaryLinearProgram {
    pub fn new(objective: Vec<f64>) -> Result<Self> {
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("objective coefficients must be finite".into()));
        }
        Ok(BinaryLinearProgram {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
            grid: None,
        })
    }

    pub fn with_grid(mut self, rows: usize, cols: usize) -> Self {
        self.grid = Some((rows, cols));
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(crate::error::shape_err(
                format!("{} coefficients", self.num_vars),
                coeffs.len(),
            ));
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("constraint data must be finite".into()));
        }
        self.constraints.push(Constraint { coeffs, rhs });
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn grid(&self) -> Option<(usize, usize)> {
        self.grid
    }

    /// Objective value of a binary assignment.
    pub fn value(&self, x: &[bool]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c)
            .sum()
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).filter(|(_, &b)| b).map(|(a, _)| a).sum();
            lhs <= c.rhs + TOLERANCE
        })
    }

    /// Upper bound on the objective of every binary completion of `fixed`,
    /// from the LP relaxation. `None` when the restriction is infeasible.
    pub fn relax_bound(&self, fixed: &[Option<bool>]) -> Option<f64> {
        self.relax(fixed).map(|(v, _)| v)
    }

    fn relax(&self, fixed: &[Option<bool>]) -> Option<(f64, Vec<f64>)> {
        let free: Vec<usize> = (0..self.num_vars).filter(|&j| fixed[j].is_none()).collect();
        let fixed_value: f64 = (0..self.num_vars)
            .filter(|&j| fixed[j] == Some(true))
            .map(|j| self.objective[j])
            .sum();
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for c in &self.constraints {
            let rhs = c.rhs
                - (0..self.num_vars)
                    .filter(|&j| fixed[j] == Some(true))
                    .map(|j| c.coeffs[j])
                    .sum::<f64>();
            let coeffs: Vec<f64> = free.iter().map(|&j| c.coeffs[j]).collect();
            if coeffs.iter().all(|&a| a == 0.0) {
                if rhs < -TOLERANCE {
                    return None;
                }
                continue;
            }
            rows.push((coeffs, rhs));
        }
        // x_j <= 1 unless a non-negative row with rhs <= a_j already implies it
        for (k, _) in free.iter().enumerate() {
            let implied = rows.iter().any(|(a, rhs)| {
                a[k] > 0.0 && *rhs >= 0.0 && *rhs <= a[k] && a.iter().all(|&v| v >= 0.0)
            });
            if !implied {
                let mut e = vec![0.0; free.len()];
                e[k] = 1.0;
                rows.push((e, 1.0));
            }
        }
        let c: Vec<f64> = free.iter().map(|&j| self.objective[j]).collect();
        let (value, x_free) = simplex_max(&c, &rows)?;
        let mut x = vec![0.0; self.num_vars];
        for j in 0..self.num_vars {
            if fixed[j] == Some(true) {
                x[j] = 1.0;
            }
        }
        for (k, &j) in free.iter().enumerate() {
            x[j] = x_free[k].clamp(0.0, 1.0);
        }
        Some((fixed_value + value, x))
    }

    /// Fixes variables forced by single constraints. Returns `false` when a
    /// constraint cannot be met.
    fn propagate(&self, fixed: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for c in &self.constraints {
                let mut min_act = 0.0;
                for (j, &a) in c.coeffs.iter().enumerate() {
                    match fixed[j] {
                        Some(true) => min_act += a,
                        None if a < 0.0 => min_act += a,
                        _ => {}
                    }
                }
                if min_act > c.rhs + TOLERANCE {
                    return false;
                }
                for (j, &a) in c.coeffs.iter().enumerate() {
                    if fixed[j].is_some() || a == 0.0 {
                        continue;
                    }
                    if a > 0.0 && min_act + a > c.rhs + TOLERANCE {
                        fixed[j] = Some(false);
                        changed = true;
                    } else if a < 0.0 && min_act - a > c.rhs + TOLERANCE {
                        fixed[j] = Some(true);
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    pub fn solve(&self) -> BlpSolution {
        let integral = self.objective.iter().all(|c| c.fract() == 0.0);
        let mut search = Search {
            p: self,
            integral,
            best: None,
            nodes: 0,
        };
        search.node(vec![None; self.num_vars]);
        let nodes = search.nodes;
        match search.best {
            Some((value, assignment)) => BlpSolution {
                assignment,
                objective_value: value,
                status: BlpStatus::Optimal,
                nodes,
            },
            None => BlpSolution {
                assignment: vec![false; self.num_vars],
                objective_value: f64::NEG_INFINITY,
                status: BlpStatus::Infeasible,
                nodes,
            },
        }
    }
}

/// Solves `p` by branch-and-bound.
pub fn solve(p: &BinaryLinearProgram) -> BlpSolution {
    p.solve()
}

struct Search<'a> {
    p: &'a BinaryLinearProgram,
    integral: bool,
    best: Option<(f64, Vec<bool>)>,
    nodes: usize,
}

impl Search<'_> {
    fn improves(&self, bound: f64) -> bool {
        let bound = if self.integral {
            (bound + 1e-6).floor()
        } else {
            bound
        };
        match &self.best {
            Some((v, _)) => bound > v + TOLERANCE,
            None => true,
        }
    }

    fn offer(&mut self, x: Vec<bool>) {
        if !self.p.is_feasible(&x) {
            return;
        }
        let v = self.p.value(&x);
        if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
            self.best = Some((v, x));
        }
    }

    fn node(&mut self, mut fixed: Vec<Option<bool>>) {
        self.nodes += 1;
        if !self.p.propagate(&mut fixed) {
            return;
        }
        if fixed.iter().all(Option::is_some) {
            self.offer(fixed.iter().map(|b| b.unwrap_or(false)).collect());
            return;
        }
        let Some((bound, x)) = self.p.relax(&fixed) else {
            return;
        };
        if !self.improves(bound) {
            return;
        }
        let mut branch_var = None;
        let mut best_frac = TOLERANCE;
        for (j, &v) in x.iter().enumerate() {
            if fixed[j].is_some() {
                continue;
            }
            let frac = v.min(1.0 - v);
            if frac > best_frac {
                best_frac = frac;
                branch_var = Some(j);
            }
        }
        let j = match branch_var {
            Some(j) => j,
            None => {
                let rounded: Vec<bool> = x.iter().map(|&v| v > 0.5).collect();
                if self.p.is_feasible(&rounded) {
                    self.offer(rounded);
                    return;
                }
                // rounding broke a constraint: keep branching on a free variable
                match (0..x.len()).find(|&j| fixed[j].is_none()) {
                    Some(j) => j,
                    None => return,
                }
            }
        };
        let mut one = fixed.clone();
        one[j] = Some(true);
        self.node(one);
        fixed[j] = Some(false);
        self.node(fixed);
    }
}

/// Maximizes `c·x` subject to `rows` (`a·x <= b`) and `x >= 0` with a dense
/// two-phase simplex. Returns `None` when infeasible; the relaxations built
/// here are bounded.
fn simplex_max(c: &[f64], rows: &[(Vec<f64>, f64)]) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    let m = rows.len();
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| rows[i].1 < 0.0).collect();
    let n_art = artificial_rows.len();
    // columns: structural | slack | artificial | rhs
    let cols = n + m + n_art;
    let width = cols + 1;
    let mut t = vec![0.0; (m + 1) * width];
    let mut basis = vec![0usize; m];
    let mut art_k = 0;
    for (i, (a, b)) in rows.iter().enumerate() {
        let row = &mut t[i * width..(i + 1) * width];
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * a[j];
        }
        row[n + i] = sign;
        row[cols] = sign * b;
        if *b < 0.0 {
            row[n + m + art_k] = 1.0;
            basis[i] = n + m + art_k;
            art_k += 1;
        } else {
            basis[i] = n + i;
        }
    }
    let mut tab = Tableau {
        t,
        m,
        width,
        basis,
        allowed: cols,
    };

    if n_art > 0 {
        // phase 1: maximize −Σ artificials
        let obj = m * width;
        for k in 0..n_art {
            tab.t[obj + n + m + k] = -1.0;
        }
        for &i in &artificial_rows {
            for j in 0..width {
                tab.t[obj + j] += tab.t[i * width + j];
            }
        }
        tab.optimize();
        if tab.t[obj + cols] > 1e-7 {
            return None;
        }
        // drive zero-level artificials out of the basis
        for i in 0..m {
            if tab.basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| tab.t[i * width + j].abs() > TOLERANCE) {
                    tab.pivot(i, j);
                }
            }
        }
        tab.allowed = n + m;
    }

    // phase 2
    let obj = m * width;
    for j in 0..width {
        tab.t[obj + j] = 0.0;
    }
    tab.t[obj..obj + n].copy_from_slice(c);
    for i in 0..m {
        let bj = tab.basis[i];
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                tab.t[obj + j] -= cb * tab.t[i * width + j];
            }
        }
    }
    tab.optimize();
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[i * width + cols];
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Some((value, x))
}

struct Tableau {
    /// `m` constraint rows then the objective row, each `width` long.
    /// The objective row holds reduced costs and minus the objective value.
    t: Vec<f64>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
    /// Columns `>= allowed` may not enter.
    allowed: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.t[r * w + j];
                if v != 0.0 {
                    self.t[i * w + j] -= f * v;
                }
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Primal simplex with Bland's rule.
    fn optimize(&mut self) {
        let w = self.width;
        let rhs = w - 1;
        let obj = self.m * w;
        loop {
            let Some(c) = (0..self.allowed).find(|&j| self.t[obj + j] > TOLERANCE) else {
                return;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i * w + c];
                if a > TOLERANCE {
                    let ratio = self.t[i * w + rhs].max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - TOLERANCE
                                || (ratio <= lr + TOLERANCE && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                // unbounded direction; cannot happen for the bounded relaxations
                None => return,
            }
        }
    }
}
