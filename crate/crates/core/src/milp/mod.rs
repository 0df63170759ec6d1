//! Desk-scale LP/MILP kernel.
//!
//! Problems are stored densely in row form. LPs are solved by a bounded dual
//! simplex on a dense tableau whose pivots only touch nonzero entries; MILPs
//! by best-first branch-and-bound on top of it. [`enumerate_milp`] is a brute
//! force oracle over the integer lattice and shares nothing with the
//! branch-and-bound code except the LP solver.

mod branch;
mod enumerate;
mod simplex;

pub use branch::solve_milp;
pub use enumerate::{enumerate_milp, enumerate_milp_with, integer_assignments};
pub use simplex::solve_lp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A bounded mixed-integer linear program, minimization form.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
    /// Branching class per variable; fractional variables of the highest
    /// class are branched on first.
    pub branch_priority: Vec<u8>,
}

impl MilpProblem {
    /// Empty problem over `num_vars` nonnegative continuous variables.
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            integer: vec![false; num_vars],
            branch_priority: vec![0; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Appends a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64, integer: bool) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.integer.push(integer);
        self.branch_priority.push(0);
        for row in &mut self.rows {
            row.coefficients.push(0.0);
        }
        self.objective.len() - 1
    }

    /// Appends a row given as sparse `(variable, coefficient)` terms.
    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let mut coefficients = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            coefficients[j] += a;
        }
        self.rows.push(Row {
            coefficients,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn has_integers(&self) -> bool {
        self.integer.iter().any(|&b| b)
    }

    /// Checks dimensions, bound ordering and integer bound finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n
            || self.upper.len() != n
            || self.integer.len() != n
            || self.branch_priority.len() != n
        {
            return Err(Error::MalformedProblem(format!(
                "bound/integrality vectors do not match {n} variables"
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(Error::MalformedProblem(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coefficients.len()
                )));
            }
            if row.rhs.is_nan() || row.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedProblem(format!("row {i} has non-finite data")));
            }
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::MalformedProblem(format!(
                    "variable {j} has bounds [{l}, {u}]"
                )));
            }
            if self.integer[j] && !(l.is_finite() && u.is_finite()) {
                return Err(Error::MalformedProblem(format!(
                    "integer variable {j} has an infinite bound"
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::MalformedProblem(format!(
                    "objective coefficient {j} is not finite"
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.num_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for row in &self.rows {
            let act: f64 = row.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match row.sense {
                Sense::Le => act - row.rhs,
                Sense::Ge => row.rhs - act,
                Sense::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of an LP solve (integrality ignored).
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals as objective sensitivities to the rhs (>= rows carry
    /// nonnegative duals, <= rows nonpositive).
    pub duals: Vec<f64>,
    /// Structural reduced costs `c - A^T y`.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub nodes: usize,
}

/// Tolerances and limits shared by the LP and MILP solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub int_tol: f64,
    /// Absolute pruning gap for branch-and-bound.
    pub gap_tol: f64,
    pub node_limit: usize,
    pub enumeration_cap: usize,
    /// Replacement magnitude for infinite variable bounds inside the simplex.
    pub artificial_bound: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            int_tol: 1e-6,
            gap_tol: 1e-9,
            node_limit: 200_000,
            enumeration_cap: 1_000_000,
            artificial_bound: 1e7,
        }
    }
}
