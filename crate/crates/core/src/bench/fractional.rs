use crate::error::Result;
use crate::milp::{solve_milp, MilpProblem, Sense, SolverOptions};

/// `min x - k` over integers `0 <= k <= x` with `x` pinned to `at`; its value
/// is the fractional part of `at` on `[0, 2]`.
pub fn fractional_part_milp(at: f64) -> MilpProblem {
    let mut p = MilpProblem::new(2);
    p.objective = vec![1.0, -1.0];
    p.lower = vec![at, 0.0];
    p.upper = vec![at, 2.0];
    p.integer = vec![false, true];
    p.add_row(&[(1, 1.0), (0, -1.0)], Sense::Le, 0.0);
    p
}

pub fn fractional_part_value(at: f64, opts: &SolverOptions) -> Result<f64> {
    Ok(solve_milp(&fractional_part_milp(at), opts)?.objective)
}
