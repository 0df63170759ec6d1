//! Per-node stage problems: assembly from a template, cut encoding and solves.

use std::collections::HashMap;

use log::warn;

use crate::cuts::CutPool;
use crate::error::{Error, Result};
use crate::milp::{solve_lp, solve_milp, MilpProblem, Sense, SolverOptions, Status};

/// Scenario-specific changes to a stage template.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioOverride {
    /// `(template row, amount added to its rhs)`.
    pub rhs: Vec<(usize, f64)>,
    /// `(variable, amount added to its objective coefficient)`.
    pub objective: Vec<(usize, f64)>,
}

/// Stage MILP skeleton. Copy variables receive the incoming state through
/// rows added at assembly; state variables form the outgoing state.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTemplate {
    pub problem: MilpProblem,
    pub state_vars: Vec<usize>,
    pub copy_vars: Vec<usize>,
    pub state_lower: Vec<f64>,
    pub state_upper: Vec<f64>,
    /// Indexed by scenario payload.
    pub scenarios: Vec<ScenarioOverride>,
    /// Lipschitz constant of the immediate cost, if known.
    pub lipschitz: Option<f64>,
}

impl StageTemplate {
    pub fn state_dim(&self) -> usize {
        self.state_vars.len()
    }

    pub fn incoming_dim(&self) -> usize {
        self.copy_vars.len()
    }

    /// Largest L1 distance between two points of the state box.
    pub fn state_diameter(&self) -> f64 {
        self.state_lower
            .iter()
            .zip(&self.state_upper)
            .map(|(l, u)| u - l)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        let n = self.problem.num_vars();
        let d = self.state_dim();
        if self.state_lower.len() != d || self.state_upper.len() != d {
            return Err(Error::MalformedProblem("state box does not match state dimension".into()));
        }
        let mut seen = vec![false; n];
        for &j in self.state_vars.iter().chain(&self.copy_vars) {
            if j >= n || seen[j] {
                return Err(Error::MalformedProblem(format!(
                    "state/copy variable {j} is out of range or repeated"
                )));
            }
            seen[j] = true;
        }
        for (l, u) in self.state_lower.iter().zip(&self.state_upper) {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(Error::MalformedProblem(format!("state box [{l}, {u}] is not finite")));
            }
        }
        if self.scenarios.is_empty() {
            return Err(Error::MalformedProblem("template has no scenarios".into()));
        }
        for (s, o) in self.scenarios.iter().enumerate() {
            if o.rhs.iter().any(|&(r, v)| r >= self.problem.rows.len() || !v.is_finite())
                || o.objective.iter().any(|&(j, v)| j >= n || !v.is_finite())
            {
                return Err(Error::MalformedProblem(format!("scenario {s} has an invalid override")));
            }
        }
        Ok(())
    }

    /// Template problem with scenario `payload` applied.
    pub fn scenario_problem(&self, payload: usize) -> Result<MilpProblem> {
        let o = self
            .scenarios
            .get(payload)
            .ok_or_else(|| Error::MalformedProblem(format!("unknown scenario payload {payload}")))?;
        let mut p = self.problem.clone();
        for &(r, v) in &o.rhs {
            p.rows[r].rhs += v;
        }
        for &(j, v) in &o.objective {
            p.objective[j] += v;
        }
        Ok(p)
    }
}

/// Variables of one cut's absolute-value encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct CutEncoding {
    pub cut: usize,
    pub row: usize,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub binary: Vec<usize>,
    pub big_m: Vec<f64>,
}

/// An assembled stage MILP and the location of its added parts.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledStage {
    pub problem: MilpProblem,
    pub alpha: usize,
    /// Copy rows, one per incoming dimension (empty when copies are relaxed).
    pub copy_rows: Vec<usize>,
    /// Encodings of cuts with a positive opening.
    pub encodings: Vec<CutEncoding>,
}

/// Builds the stage MILP for `payload`: copy rows pinning the copy variables
/// to `incoming` (omitted when `incoming` is `None`), an epigraph variable
/// bounded below by the pool floor, and one row per cut. Cuts with a positive
/// opening get split variables and one binary per state dimension, shared
/// between cuts whose centers agree in that dimension.
pub fn assemble_stage(
    template: &StageTemplate,
    payload: usize,
    incoming: Option<&[f64]>,
    pool: &CutPool,
) -> Result<AssembledStage> {
    let mut p = template.scenario_problem(payload)?;
    let d = template.state_dim();
    for (k, &j) in template.state_vars.iter().enumerate() {
        p.lower[j] = p.lower[j].max(template.state_lower[k]);
        p.upper[j] = p.upper[j].min(template.state_upper[k]);
    }
    let mut copy_rows = Vec::new();
    if let Some(inc) = incoming {
        if inc.len() != template.incoming_dim() {
            return Err(Error::MalformedProblem(format!(
                "incoming state has dimension {}, expected {}",
                inc.len(),
                template.incoming_dim()
            )));
        }
        for (&j, &v) in template.copy_vars.iter().zip(inc) {
            copy_rows.push(p.add_row(&[(j, 1.0)], Sense::Eq, v));
        }
    }
    // Decisions of the stage itself are branched on before encoding binaries.
    for j in 0..p.num_vars() {
        if p.integer[j] {
            p.branch_priority[j] = 1;
        }
    }
    let alpha = p.add_var(1.0, pool.floor, f64::INFINITY, false);
    let mut encodings = Vec::new();
    let mut abs_terms: HashMap<(usize, u64), (usize, usize, usize)> = HashMap::new();
    for (ci, cut) in pool.cuts.iter().enumerate() {
        if cut.dim() != d || cut.slope.len() != d {
            return Err(Error::MalformedProblem(format!(
                "cut {ci} has dimension {}, state dimension is {d}",
                cut.dim()
            )));
        }
        let outside = cut.center.iter().enumerate().any(|(k, &c)| {
            let tol = 1e-9 * (1.0 + c.abs());
            !(c >= template.state_lower[k] - tol && c <= template.state_upper[k] + tol)
        });
        if outside {
            return Err(Error::CenterOutsideBox {
                center: cut.center.clone(),
            });
        }
        // alpha - slope.x + rho * sum(u+ + u-) >= v - slope.center
        let mut terms = vec![(alpha, 1.0)];
        let mut rhs = cut.intercept;
        for k in 0..d {
            if cut.slope[k] != 0.0 {
                terms.push((template.state_vars[k], -cut.slope[k]));
                rhs -= cut.slope[k] * cut.center[k];
            }
        }
        if cut.rho > 0.0 {
            let mut enc = CutEncoding {
                cut: ci,
                row: 0,
                plus: Vec::with_capacity(d),
                minus: Vec::with_capacity(d),
                binary: Vec::with_capacity(d),
                big_m: Vec::with_capacity(d),
            };
            for k in 0..d {
                let m = template.state_upper[k] - template.state_lower[k];
                let c = cut.center[k];
                // |x_k - c| is encoded once per distinct center coordinate.
                let (up, um, z) = *abs_terms.entry((k, c.to_bits())).or_insert_with(|| {
                    let up = p.add_var(0.0, 0.0, m, false);
                    let um = p.add_var(0.0, 0.0, m, false);
                    let z = p.add_var(0.0, 0.0, 1.0, true);
                    let x = template.state_vars[k];
                    p.add_row(&[(up, 1.0), (um, -1.0), (x, -1.0)], Sense::Eq, -c);
                    p.add_row(&[(up, 1.0), (z, -m)], Sense::Le, 0.0);
                    p.add_row(&[(um, 1.0), (z, m)], Sense::Le, m);
                    (up, um, z)
                });
                terms.push((up, cut.rho));
                terms.push((um, cut.rho));
                enc.plus.push(up);
                enc.minus.push(um);
                enc.binary.push(z);
                enc.big_m.push(m);
            }
            enc.row = p.add_row(&terms, Sense::Ge, rhs);
            encodings.push(enc);
        } else {
            p.add_row(&terms, Sense::Ge, rhs);
        }
    }
    Ok(AssembledStage {
        problem: p,
        alpha,
        copy_rows,
        encodings,
    })
}

/// Node and stage reported in stage errors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Site {
    pub node: usize,
    pub stage: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageSolution {
    /// Outgoing state.
    pub state: Vec<f64>,
    /// Values of the template variables.
    pub values: Vec<f64>,
    /// Stage objective including the cost-to-go approximation.
    pub objective: f64,
    pub alpha: f64,
    /// `objective - alpha`.
    pub immediate_cost: f64,
    /// Copy-row duals of the LP with the stage integers fixed at the optimum
    /// and the norm-encoding binaries relaxed.
    pub copy_duals: Option<Vec<f64>>,
    /// `sum(u+ + u-)` per encoded cut, in encoding order.
    pub norm_terms: Vec<f64>,
    pub nodes: usize,
}

fn check_status(status: Status, site: Site) -> Result<()> {
    match status {
        Status::Optimal => Ok(()),
        Status::Infeasible => Err(Error::StageInfeasible {
            node: site.node,
            stage: site.stage,
        }),
        Status::Unbounded => Err(Error::StageUnbounded {
            node: site.node,
            stage: site.stage,
        }),
    }
}

/// Solves the stage problem at `incoming`. With `want_duals`, also re-solves
/// the LP with the stage integers fixed and returns the copy-row duals.
pub fn solve_stage(
    template: &StageTemplate,
    payload: usize,
    incoming: &[f64],
    pool: &CutPool,
    want_duals: bool,
    site: Site,
    opts: &SolverOptions,
) -> Result<StageSolution> {
    let asm = assemble_stage(template, payload, Some(incoming), pool)?;
    let sol = solve_milp(&asm.problem, opts)?;
    check_status(sol.status, site)?;
    let state: Vec<f64> = template.state_vars.iter().map(|&j| sol.x[j]).collect();
    let alpha = sol.x[asm.alpha];
    let pool_value = pool.value(&state);
    if (alpha - pool_value).abs() > 1e-6 * (1.0 + pool_value.abs()) {
        warn!(
            "stage {} node {}: epigraph {alpha} differs from pool value {pool_value}",
            site.stage, site.node
        );
    }
    let copy_duals = if want_duals {
        // Stage integers are pinned; the norm-encoding binaries of the pool
        // are relaxed so the slope follows the continuous part of the pool.
        let mut fixed = asm.problem.clone();
        let own = template.problem.num_vars();
        for j in 0..fixed.num_vars() {
            if fixed.integer[j] && j >= own {
                fixed.integer[j] = false;
            } else if fixed.integer[j] {
                let v = sol.x[j].round();
                fixed.lower[j] = v;
                fixed.upper[j] = v;
                fixed.integer[j] = false;
            }
        }
        let lp = solve_lp(&fixed, opts)?;
        check_status(lp.status, site)?;
        Some(asm.copy_rows.iter().map(|&r| lp.duals[r]).collect())
    } else {
        None
    };
    let norm_terms = asm
        .encodings
        .iter()
        .map(|e| e.plus.iter().chain(&e.minus).map(|&j| sol.x[j]).sum())
        .collect();
    Ok(StageSolution {
        state,
        values: sol.x[..template.problem.num_vars()].to_vec(),
        objective: sol.objective,
        alpha,
        immediate_cost: sol.objective - alpha,
        copy_duals,
        norm_terms,
        nodes: sol.nodes,
    })
}

/// Optimal value of the copy-relaxed stage problem
/// `min f + pool + slope.(center - z) + rho * |z - center|_1` with the copy
/// variables `z` free within their template bounds.
#[allow(clippy::too_many_arguments)]
pub fn lagrangian_value(
    template: &StageTemplate,
    payload: usize,
    center: &[f64],
    pool: &CutPool,
    slope: &[f64],
    rho: f64,
    site: Site,
    opts: &SolverOptions,
) -> Result<f64> {
    if center.len() != template.incoming_dim() || slope.len() != center.len() {
        return Err(Error::MalformedProblem("center/slope dimension mismatch".into()));
    }
    if rho < 0.0 || slope.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidConfig(format!("invalid augmentation rho={rho}")));
    }
    let mut asm = assemble_stage(template, payload, None, pool)?;
    let p = &mut asm.problem;
    let mut constant = 0.0;
    for (k, &z) in template.copy_vars.iter().enumerate() {
        p.objective[z] -= slope[k];
        constant += slope[k] * center[k];
        if rho > 0.0 {
            let width = (p.upper[z] - p.lower[z]).max(0.0);
            let wp = p.add_var(rho, 0.0, width, false);
            let wm = p.add_var(rho, 0.0, width, false);
            p.add_row(&[(z, 1.0), (wp, -1.0), (wm, 1.0)], Sense::Eq, center[k]);
        }
    }
    let sol = solve_milp(p, opts)?;
    check_status(sol.status, site)?;
    Ok(sol.objective + constant)
}

/// `max(floor, max over cuts)` at `x`.
pub fn evaluate_pool(pool: &CutPool, x: &[f64]) -> f64 {
    pool.value(x)
}
