//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems here are tiny (tens of rows), so the solver keeps a full dense
//! tableau and recomputes reduced costs every pivot. Bland's rule makes the
//! pivot sequence a pure function of the input.

use super::SolverConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Minimize,
    Maximize,
}

/// `goal  objectiveᵀx  s.t.  rows[i]·x (senses[i]) rhs[i],  lo ≤ x ≤ hi`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub goal: Goal,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// Per-variable bounds, either end may be infinite. Defaults to `[0, ∞)`.
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Sensitivity of the optimal value to each constraint right-hand side.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(goal: Goal, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            goal,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn bound(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.bound(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.senses.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(Error::InvalidInput("row/sense/rhs counts differ".into()));
        }
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.bounds.len() });
        }
        for row in &self.rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite constraint coefficient".into()));
            }
        }
        if self.objective.iter().chain(&self.rhs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite objective or rhs".into()));
        }
        for &(lo, hi) in &self.bounds {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!("bad bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// How an original variable is expressed through nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + sign * y
    Shifted { col: usize, offset: f64, sign: f64 },
    /// x = y⁺ - y⁻
    Split { pos: usize, neg: usize },
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

struct Tableau {
    /// m rows of length `ncols + 1`, last entry is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= pv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut r = cost[j];
        for (i, row) in self.t.iter().enumerate() {
            r -= cost[self.basis[i]] * row[j];
        }
        r
    }

    fn run(&mut self, cost: &[f64], allowed: &[bool], max_iter: usize) -> Result<Phase> {
        for _ in 0..max_iter {
            let entering = (0..self.ncols)
                .find(|&j| allowed[j] && !self.basis.contains(&j) && self.reduced_cost(cost, j) < -COST_TOL);
            let Some(c) = entering else {
                return Ok(Phase::Optimal);
            };
            let rhs = self.ncols;
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[c] > PIVOT_TOL {
                    let ratio = row[rhs] / row[c];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14 || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(Phase::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::IterationLimit(max_iter))
    }
}

/// Solve a dense LP.
///
/// Returns `Err(IterationLimit)` when a phase exceeds
/// `cfg.iteration_factor * (vars + constraints)` pivots.
pub fn solve_lp(lp: &LinearProgram, cfg: &SolverConfig) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    // Column layout: structural columns first, then slacks, then artificials.
    let mut maps = Vec::with_capacity(n);
    let mut ncol = 0usize;
    // (column, upper bound) rows for doubly bounded variables
    let mut ub_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            maps.push(VarMap::Shifted { col: ncol, offset: lo, sign: 1.0 });
            if hi.is_finite() {
                ub_rows.push((ncol, hi - lo));
            }
            ncol += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Shifted { col: ncol, offset: hi, sign: -1.0 });
            ncol += 1;
        } else {
            maps.push(VarMap::Split { pos: ncol, neg: ncol + 1 });
            ncol += 2;
        }
    }
    let nstruct = ncol;

    // Rows in structural columns, before slacks.
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for ((coeffs, &sense), &b) in lp.rows.iter().zip(&lp.senses).zip(&lp.rhs) {
        let mut r = vec![0.0; nstruct];
        let mut shift = 0.0;
        for (j, &a) in coeffs.iter().enumerate() {
            match maps[j] {
                VarMap::Shifted { col, offset, sign } => {
                    r[col] += a * sign;
                    shift += a * offset;
                }
                VarMap::Split { pos, neg } => {
                    r[pos] += a;
                    r[neg] -= a;
                }
            }
        }
        rows.push((r, sense, b - shift));
    }
    let n_user_rows = rows.len();
    for &(col, ub) in &ub_rows {
        let mut r = vec![0.0; nstruct];
        r[col] = 1.0;
        rows.push((r, Sense::Le, ub));
    }

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let ntot = nstruct + nslack + m;
    let mut t = Vec::with_capacity(m);
    let mut flip = vec![1.0; m];
    let mut slack = nstruct;
    for (i, (r, sense, b)) in rows.into_iter().enumerate() {
        let mut row = vec![0.0; ntot + 1];
        row[..nstruct].copy_from_slice(&r);
        match sense {
            Sense::Le => {
                row[slack] = 1.0;
                slack += 1;
            }
            Sense::Ge => {
                row[slack] = -1.0;
                slack += 1;
            }
            Sense::Eq => {}
        }
        row[ntot] = b;
        if b < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            flip[i] = -1.0;
        }
        row[nstruct + nslack + i] = 1.0;
        t.push(row);
    }
    let art0 = nstruct + nslack;
    let mut tab = Tableau { t, basis: (art0..art0 + m).collect(), ncols: ntot };
    let max_iter = cfg.cap(ntot + m);

    // Phase 1: minimise the sum of artificials.
    let mut cost1 = vec![0.0; ntot];
    for c in cost1.iter_mut().skip(art0) {
        *c = 1.0;
    }
    let all = vec![true; ntot];
    tab.run(&cost1, &all, max_iter)?;
    let infeas: f64 = tab.t.iter().zip(&tab.basis).filter(|(_, &b)| b >= art0).map(|(r, _)| r[ntot]).sum();
    let bnorm = lp.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if infeas > cfg.feasibility * (1.0 + bnorm) {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive zero-level artificials out of the basis; rows that cannot be
    // pivoted are redundant and dropped.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= art0 {
            let col = (0..art0).find(|&j| tab.t[i][j].abs() > 1e-9 && !tab.basis.contains(&j));
            match col {
                Some(c) => tab.pivot(i, c),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 on the original objective (minimisation form).
    let gsign = match lp.goal {
        Goal::Minimize => 1.0,
        Goal::Maximize => -1.0,
    };
    let mut cost2 = vec![0.0; ntot];
    for (j, &c) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shifted { col, sign, .. } => cost2[col] += gsign * c * sign,
            VarMap::Split { pos, neg } => {
                cost2[pos] += gsign * c;
                cost2[neg] -= gsign * c;
            }
        }
    }
    let mut allowed = vec![true; ntot];
    for a in allowed.iter_mut().skip(art0) {
        *a = false;
    }
    if let Phase::Unbounded = tab.run(&cost2, &allowed, max_iter)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![0.0; ntot];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.t[i][ntot];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shifted { col, offset, sign } => offset + sign * y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    // Simplex multipliers: tableau column of artificial i is B⁻¹ e_i.
    let duals = (0..n_user_rows)
        .map(|i| {
            let col = art0 + i;
            let yi: f64 = tab.basis.iter().enumerate().map(|(k, &b)| cost2[b] * tab.t[k][col]).sum();
            gsign * flip[i] * yi
        })
        .collect();

    Ok(LpOutcome::Optimal(LpSolution { x, value, duals }))
}
