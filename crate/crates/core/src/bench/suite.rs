//! Benchmark suites shared by the command line, the examples and the
//! acceptance tests.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cuts::{CutFamily, RhoSchedule};
use crate::engine::{run, Mode, RhoRule, RunResult, SldpConfig};
use crate::error::Result;
use crate::milp::SolverOptions;

use super::{gen_caroe_schultz, gen_control1d, grid_points, CaroeSchultzSpec, ControlProblemSpec, Oracle, OracleTable};

/// Full-tree configuration used on the two-stage instances.
pub fn caroe_sldp_config(cuts: CutFamily, iterations: usize) -> SldpConfig {
    SldpConfig {
        mode: Mode::Full,
        cuts,
        max_iterations: iterations,
        rho: RhoRule::Schedule(RhoSchedule {
            rho0: 1.0,
            gamma: 2.0,
            period: 5,
            rho_max: 1e3,
        }),
        ..SldpConfig::default()
    }
}

/// Sampled configuration used on the control problem; openings follow the
/// model's Lipschitz hint.
pub fn control_sldp_config(cuts: CutFamily, iterations: usize, sim_samples: usize, seed: u64) -> SldpConfig {
    SldpConfig {
        mode: Mode::Sampled,
        cuts,
        max_iterations: iterations,
        rho: RhoRule::Hint,
        seed,
        sim_samples,
        ..SldpConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaroeRow {
    pub n: usize,
    pub discrete: bool,
    /// Exact optimum from the enumeration oracle.
    pub objective: f64,
    pub sb_lb: f64,
    pub sab_lb: f64,
    pub sb_secs: f64,
    pub sab_secs: f64,
}

impl CaroeRow {
    /// Share of the convex gap left open by the augmented cuts, in percent.
    pub fn remaining_percent(&self) -> f64 {
        let gap = self.objective - self.sb_lb;
        if gap.abs() < 1e-12 {
            0.0
        } else {
            100.0 * (self.objective - self.sab_lb) / gap
        }
    }
}

/// Exact optimum of a Carøe–Schultz instance. The second-stage value
/// function only changes at integer first-stage coordinates and the
/// first-stage cost decreases in both coordinates, so the integer grid
/// also holds a continuous optimum.
pub fn caroe_objective(spec: &CaroeSchultzSpec) -> Result<f64> {
    let model = gen_caroe_schultz(spec);
    let points = grid_points(&[0.0, 0.0], &[5.0, 5.0], 1.0);
    Ok(Oracle::new(&model, SolverOptions::default(), 1_000_000)
        .root_value_on_points(&points)?
        .0)
}

/// Exact optimum together with the first-stage expected cost-to-go on a
/// grid of the first-stage box.
pub fn caroe_grid_table(spec: &CaroeSchultzSpec, spacing: f64) -> Result<(f64, OracleTable)> {
    let model = gen_caroe_schultz(spec);
    let mut oracle = Oracle::new(&model, SolverOptions::default(), 1_000_000);
    let objective = oracle.root_value_on_points(&grid_points(&[0.0, 0.0], &[5.0, 5.0], 1.0))?.0;
    let mut points = Vec::new();
    for x in grid_points(&[0.0, 0.0], &[5.0, 5.0], spacing) {
        let v = oracle.expected_ctg(1, &x)?;
        points.push((x, v));
    }
    let exact = points.iter().all(|(x, _)| x.iter().all(|v| v.fract() == 0.0));
    Ok((objective, OracleTable { stage: 1, points, exact }))
}

pub fn run_caroe_row(spec: &CaroeSchultzSpec, iterations: usize) -> Result<CaroeRow> {
    let model = gen_caroe_schultz(spec);
    let objective = caroe_objective(spec)?;
    let timed = |cuts| -> Result<(RunResult, f64)> {
        let t = Instant::now();
        let r = run(&model, &caroe_sldp_config(cuts, iterations))?;
        Ok((r, t.elapsed().as_secs_f64()))
    };
    let (sb, sb_secs) = timed(CutFamily::StrengthenedBenders)?;
    let (sab, sab_secs) = timed(CutFamily::StrengthenedAugBenders)?;
    Ok(CaroeRow {
        n: spec.n,
        discrete: spec.discrete_first_stage,
        objective,
        sb_lb: sb.lower_bound,
        sab_lb: sab.lower_bound,
        sb_secs,
        sab_secs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlRow {
    pub method: CutFamily,
    pub lb: f64,
    pub ub_mean: f64,
    pub ub_std_error: f64,
    pub secs: f64,
}

/// Strengthened Benders, reverse-norm and strengthened augmented Benders
/// runs on the control problem.
pub fn run_control_suite(
    spec: &ControlProblemSpec,
    iterations: usize,
    sim_samples: usize,
    seed: u64,
) -> Result<Vec<ControlRow>> {
    let model = gen_control1d(spec)?;
    let mut rows = Vec::new();
    for cuts in [
        CutFamily::StrengthenedBenders,
        CutFamily::ReverseNorm,
        CutFamily::StrengthenedAugBenders,
    ] {
        let t = Instant::now();
        let r = run(&model, &control_sldp_config(cuts, iterations, sim_samples.max(1), seed))?;
        let policy = r.policy.expect("simulation requested");
        rows.push(ControlRow {
            method: cuts,
            lb: r.lower_bound,
            ub_mean: policy.mean,
            ub_std_error: policy.std_error,
            secs: t.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}
