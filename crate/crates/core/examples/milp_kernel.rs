//! The built-in LP and MILP solvers on a small knapsack-like problem.
//!
//! Shows the LP relaxation with its row duals, branch-and-bound, and the
//! exhaustive enumeration used as a cross-check.

use sldp::milp::{enumerate_milp, solve_lp, solve_milp, MilpProblem, Sense, SolverOptions};

fn main() -> sldp::Result<()> {
    // max 5a + 4b + 3c  s.t.  2a + 3b + c <= 5.5,  4a + b + 2c <= 11,  3a + 4b + 2c <= 8.5
    let mut p = MilpProblem::new(3);
    p.objective = vec![-5.0, -4.0, -3.0];
    p.upper = vec![3.0; 3];
    p.integer = vec![true; 3];
    p.add_row(&[(0, 2.0), (1, 3.0), (2, 1.0)], Sense::Le, 5.5);
    p.add_row(&[(0, 4.0), (1, 1.0), (2, 2.0)], Sense::Le, 11.0);
    p.add_row(&[(0, 3.0), (1, 4.0), (2, 2.0)], Sense::Le, 8.5);

    let opts = SolverOptions::default();
    let lp = solve_lp(&p, &opts)?;
    println!("LP relaxation: {:?} value {:.4} at {:?}", lp.status, lp.objective, lp.x);
    println!("row duals: {:?}", lp.duals);

    let bb = solve_milp(&p, &opts)?;
    println!("branch-and-bound: value {:.4} at {:?} ({} nodes)", bb.objective, bb.x, bb.nodes);

    let en = enumerate_milp(&p, &opts)?;
    println!("enumeration: value {:.4} at {:?}", en.objective, en.x);
    Ok(())
}
