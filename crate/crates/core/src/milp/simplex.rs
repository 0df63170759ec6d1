//! Bounded dual simplex on a dense tableau.
//!
//! Every row `a_i x` gets a logical variable `r_i` with `A x - r = 0`, and the
//! row sense becomes a bound on `r_i`. Infinite bounds are replaced by an
//! artificial box so that every variable is boxed; then any basis is dual
//! feasible once each nonbasic variable sits at the bound matching the sign of
//! its reduced cost. That lets one dual simplex serve cold solves from the
//! slack basis and warm re-solves after bound changes in branch-and-bound.

use super::{LpSolution, MilpProblem, Sense, SolverOptions, Status};
use crate::error::{Error, Result};

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
}

pub(crate) struct Tableau {
    m: usize,
    n: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    lb_artificial: Vec<bool>,
    ub_artificial: Vec<bool>,
    tab: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    d: Vec<f64>,
    big: f64,
    feas_tol: f64,
    scratch_idx: Vec<usize>,
    scratch_val: Vec<f64>,
    pub(crate) iterations: usize,
}

impl Tableau {
    /// Slack-basis tableau for `p` (integrality ignored).
    pub(crate) fn new(p: &MilpProblem, opts: &SolverOptions) -> Self {
        let n = p.num_vars();
        let m = p.rows.len();
        let ncols = n + m;
        let big = opts.artificial_bound;
        let rows: Vec<Vec<(usize, f64)>> = p
            .rows
            .iter()
            .map(|r| {
                r.coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a != 0.0)
                    .map(|(j, a)| (j, *a))
                    .collect()
            })
            .collect();
        let mut cost = vec![0.0; ncols];
        cost[..n].copy_from_slice(&p.objective);
        let mut lb = vec![0.0; ncols];
        let mut ub = vec![0.0; ncols];
        let mut lb_artificial = vec![false; ncols];
        let mut ub_artificial = vec![false; ncols];
        for j in 0..n {
            lb_artificial[j] = !p.lower[j].is_finite();
            ub_artificial[j] = !p.upper[j].is_finite();
            lb[j] = if lb_artificial[j] { -big } else { p.lower[j] };
            ub[j] = if ub_artificial[j] { big } else { p.upper[j] };
        }
        for (i, row) in p.rows.iter().enumerate() {
            let k = n + i;
            match row.sense {
                Sense::Le => {
                    lb[k] = -big.max(big * row.rhs.abs());
                    lb_artificial[k] = true;
                    ub[k] = row.rhs;
                }
                Sense::Ge => {
                    lb[k] = row.rhs;
                    ub[k] = big.max(big * row.rhs.abs());
                    ub_artificial[k] = true;
                }
                Sense::Eq => {
                    lb[k] = row.rhs;
                    ub[k] = row.rhs;
                }
            }
        }
        let mut t = Self {
            m,
            n,
            ncols,
            rows,
            cost,
            lb,
            ub,
            lb_artificial,
            ub_artificial,
            tab: vec![0.0; m * ncols],
            basis: (n..n + m).collect(),
            state: vec![VarState::Lower; ncols],
            x: vec![0.0; ncols],
            d: vec![0.0; ncols],
            big,
            feas_tol: opts.feas_tol,
            scratch_idx: Vec::new(),
            scratch_val: Vec::new(),
            iterations: 0,
        };
        t.load_slack_tableau();
        t.finish_basis();
        t
    }


    pub(crate) fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub(crate) fn objective(&self) -> f64 {
        self.cost[..self.n]
            .iter()
            .zip(&self.x[..self.n])
            .map(|(c, v)| c * v)
            .sum()
    }

    fn load_slack_tableau(&mut self) {
        self.tab.iter_mut().for_each(|v| *v = 0.0);
        let nc = self.ncols;
        for i in 0..self.m {
            for &(j, a) in &self.rows[i] {
                self.tab[i * nc + j] = -a;
            }
            self.tab[i * nc + self.n + i] = 1.0;
            self.basis[i] = self.n + i;
        }
    }

    /// Recomputes reduced costs, nonbasic statuses and basic values from the
    /// current tableau.
    fn finish_basis(&mut self) {
        for s in self.state.iter_mut() {
            if *s == VarState::Basic {
                *s = VarState::Lower;
            }
        }
        for &b in &self.basis {
            self.state[b] = VarState::Basic;
        }
        self.recompute_duals();
        for j in 0..self.ncols {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let dj = self.d[j];
            self.state[j] = if dj > DUAL_TOL {
                VarState::Lower
            } else if dj < -DUAL_TOL {
                VarState::Upper
            } else if self.lb_artificial[j] && !self.ub_artificial[j] {
                VarState::Upper
            } else if self.ub_artificial[j] && !self.lb_artificial[j] {
                VarState::Lower
            } else {
                self.state[j]
            };
            self.x[j] = match self.state[j] {
                VarState::Upper => self.ub[j],
                _ => self.lb[j],
            };
        }
        self.recompute_primal();
    }

    fn recompute_duals(&mut self) {
        let nc = self.ncols;
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[i * nc..(i + 1) * nc];
            for (dj, t) in self.d.iter_mut().zip(row) {
                *dj -= cb * t;
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
    }

    fn recompute_primal(&mut self) {
        let nc = self.ncols;
        let mut xn = self.x.clone();
        for &b in &self.basis {
            xn[b] = 0.0;
        }
        for i in 0..self.m {
            let row = &self.tab[i * nc..(i + 1) * nc];
            let s: f64 = row.iter().zip(&xn).map(|(t, v)| t * v).sum();
            self.x[self.basis[i]] = -s;
        }
    }

    /// Replaces structural bounds, moving nonbasic variables onto their new
    /// bounds and updating basic values incrementally.
    pub(crate) fn set_structural_bounds(&mut self, lower: &[f64], upper: &[f64]) {
        let nc = self.ncols;
        for j in 0..self.n {
            self.lb[j] = if self.lb_artificial[j] { -self.big } else { lower[j] };
            self.ub[j] = if self.ub_artificial[j] { self.big } else { upper[j] };
            if self.state[j] == VarState::Basic {
                continue;
            }
            let target = match self.state[j] {
                VarState::Upper => self.ub[j],
                _ => self.lb[j],
            };
            let delta = target - self.x[j];
            if delta != 0.0 {
                self.x[j] = target;
                for i in 0..self.m {
                    let t = self.tab[i * nc + j];
                    if t != 0.0 {
                        self.x[self.basis[i]] -= t * delta;
                    }
                }
            }
        }
    }

    /// Moves the tableau to `target` basis (one basic variable per row),
    /// rebuilding it from the slack tableau. Rows that cannot be pivoted keep
    /// their logical variable.
    pub(crate) fn load_basis(&mut self, target: &[usize]) {
        if target == self.basis.as_slice() {
            return;
        }
        self.reinvert(target);
    }

    fn reinvert(&mut self, target: &[usize]) {
        let target: Vec<usize> = target.to_vec();
        let nc = self.ncols;
        let mut in_target = vec![false; self.ncols];
        for &b in &target {
            in_target[b] = true;
        }
        self.load_slack_tableau();
        let mut structurals: Vec<usize> = target.iter().copied().filter(|&j| j < self.n).collect();
        structurals.sort_unstable();
        for q in structurals {
            let mut best = None;
            let mut best_abs = PIVOT_TOL;
            for i in 0..self.m {
                let b = self.basis[i];
                if b < self.n || in_target[b] {
                    continue;
                }
                let v = self.tab[i * nc + q].abs();
                if v > best_abs {
                    best_abs = v;
                    best = Some(i);
                }
            }
            if let Some(r) = best {
                self.pivot(r, q);
            }
        }
        self.finish_basis();
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let start = r * nc;
        let piv = self.tab[start + q];
        self.scratch_idx.clear();
        self.scratch_val.clear();
        for j in 0..nc {
            let v = self.tab[start + j];
            if v != 0.0 {
                let w = v / piv;
                if w.abs() < DROP_TOL {
                    self.tab[start + j] = 0.0;
                } else {
                    self.tab[start + j] = w;
                    self.scratch_idx.push(j);
                    self.scratch_val.push(w);
                }
            }
        }
        self.tab[start + q] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let base = i * nc;
            let f = self.tab[base + q];
            if f == 0.0 {
                continue;
            }
            for (&j, &w) in self.scratch_idx.iter().zip(&self.scratch_val) {
                let v = self.tab[base + j] - f * w;
                self.tab[base + j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            self.tab[base + q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for (&j, &w) in self.scratch_idx.iter().zip(&self.scratch_val) {
                self.d[j] -= f * w;
            }
        }
        self.d[q] = 0.0;
        self.basis[r] = q;
    }

    /// Runs the dual simplex from the current (dual feasible) basis.
    pub(crate) fn solve(&mut self) -> Result<LpOutcome> {
        let outcome = self.dual_simplex()?;
        if outcome == LpOutcome::Optimal && self.residual() > 1e-8 {
            let basis = self.basis.clone();
            self.reinvert(&basis);
            return self.dual_simplex();
        }
        Ok(outcome)
    }

    fn residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let act: f64 = row.iter().map(|&(j, a)| a * self.x[j]).sum();
            let r = self.x[self.n + i];
            worst = worst.max((act - r).abs() / (1.0 + act.abs()));
        }
        worst
    }

    fn dual_simplex(&mut self) -> Result<LpOutcome> {
        let nc = self.ncols;
        let limit = 50 * (self.m + self.n) + 1000;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let mut iter = 0usize;
        // Variables whose tiny violation no pivot can remove.
        let mut tolerated = vec![false; nc];
        loop {
            iter += 1;
            if iter > limit {
                return Err(Error::NumericalFailure(format!(
                    "dual simplex exceeded {limit} iterations"
                )));
            }
            // Leaving row: largest bound violation (lowest variable index in Bland mode).
            let mut leave: Option<usize> = None;
            let mut best = 0.0;
            for i in 0..self.m {
                let b = self.basis[i];
                if tolerated[b] {
                    continue;
                }
                let v = self.x[b];
                let viol = if v < self.lb[b] - PRIMAL_TOL {
                    self.lb[b] - v
                } else if v > self.ub[b] + PRIMAL_TOL {
                    v - self.ub[b]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some(l) if bland => b < self.basis[l],
                    Some(_) => viol > best,
                };
                if better {
                    best = viol;
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return Ok(LpOutcome::Optimal);
            };
            let p = self.basis[r];
            let to_lower = self.x[p] < self.lb[p];
            let target = if to_lower { self.lb[p] } else { self.ub[p] };

            // Entering column: dual ratio test over the pivot row.
            let start = r * nc;
            let mut enter: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_abs = 0.0;
            for j in 0..nc {
                let t = self.tab[start + j];
                if t.abs() <= PIVOT_TOL {
                    continue;
                }
                let st = self.state[j];
                if st == VarState::Basic || self.lb[j] == self.ub[j] {
                    continue;
                }
                // x_p moves by -t per unit increase of x_j.
                let eligible = match (st, to_lower) {
                    (VarState::Lower, true) => t < 0.0,
                    (VarState::Upper, true) => t > 0.0,
                    (VarState::Lower, false) => t > 0.0,
                    (VarState::Upper, false) => t < 0.0,
                    _ => false,
                };
                if !eligible {
                    continue;
                }
                let dj = match st {
                    VarState::Lower => self.d[j].max(0.0),
                    _ => (-self.d[j]).max(0.0),
                };
                let ratio = dj / t.abs();
                let take = match enter {
                    None => true,
                    Some(_) if ratio < best_ratio - 1e-12 => true,
                    Some(_) if ratio <= best_ratio + 1e-12 => !bland && t.abs() > best_abs,
                    _ => false,
                };
                if take {
                    enter = Some(j);
                    best_ratio = ratio.min(best_ratio);
                    best_abs = t.abs();
                }
            }
            let Some(q) = enter else {
                if best <= self.feas_tol {
                    tolerated[p] = true;
                    continue;
                }
                return Ok(LpOutcome::Infeasible);
            };

            let alpha = self.tab[start + q];
            let step = (target - self.x[p]) / (-alpha);
            if step != 0.0 {
                for i in 0..self.m {
                    let t = self.tab[i * nc + q];
                    if t != 0.0 {
                        self.x[self.basis[i]] -= t * step;
                    }
                }
                self.x[q] += step;
            }
            self.x[p] = target;
            self.state[p] = if to_lower {
                VarState::Lower
            } else {
                VarState::Upper
            };
            self.state[q] = VarState::Basic;
            self.pivot(r, q);
            self.iterations += 1;

            if best_ratio < 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            bland = degenerate_run > 2 * self.n;
        }
    }

    /// True when some variable with a nonzero reduced cost rests on an
    /// artificial bound, i.e. the objective keeps improving without limit.
    pub(crate) fn rests_on_artificial_bound(&self) -> bool {
        (0..self.ncols).any(|j| match self.state[j] {
            VarState::Lower => self.lb_artificial[j] && self.d[j].abs() > DUAL_TOL,
            VarState::Upper => self.ub_artificial[j] && self.d[j].abs() > DUAL_TOL,
            VarState::Basic => false,
        })
    }

    pub(crate) fn row_duals(&self) -> Vec<f64> {
        self.d[self.n..].to_vec()
    }

    pub(crate) fn reduced_costs(&self) -> Vec<f64> {
        self.d[..self.n].to_vec()
    }
}

/// Solves the LP relaxation of `p`.
pub fn solve_lp(p: &MilpProblem, opts: &SolverOptions) -> Result<LpSolution> {
    p.validate()?;
    let mut t = Tableau::new(p, opts);
    let outcome = t.solve()?;
    let n = p.num_vars();
    let status = match outcome {
        LpOutcome::Infeasible => Status::Infeasible,
        LpOutcome::Optimal if t.rests_on_artificial_bound() => Status::Unbounded,
        LpOutcome::Optimal => Status::Optimal,
    };
    let (objective, x) = match status {
        Status::Optimal => (t.objective(), t.values().to_vec()),
        Status::Infeasible => (f64::INFINITY, vec![f64::NAN; n]),
        Status::Unbounded => (f64::NEG_INFINITY, t.values().to_vec()),
    };
    Ok(LpSolution {
        status,
        x,
        objective,
        duals: t.row_duals(),
        reduced_costs: t.reduced_costs(),
        iterations: t.iterations,
    })
}
