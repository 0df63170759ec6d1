//! Minimizing a Lipschitz black box with reverse-norm cuts.
//!
//! The tent `g(x) = min(x, 1, 3 - x)` on `[0, 3]` has Lipschitz constant 1;
//! each evaluation adds one cut and the master bound climbs to the minimum 0.

use sldp::engine::reverse_cut_minimize;
use sldp::milp::{MilpProblem, SolverOptions};

fn main() -> sldp::Result<()> {
    let mut problem = MilpProblem::new(1);
    problem.upper[0] = 3.0;
    let tent = |x: &[f64]| Ok(x[0].min(1.0).min(3.0 - x[0]));
    let r = reverse_cut_minimize(&problem, &[0], &[0.0], &[3.0], tent, 1.0, 1e-4, -10.0, 100, &SolverOptions::default())?;
    println!("{:>4} {:>10} {:>12}", "iter", "x", "bound");
    for (k, (x, nu)) in r.iterates.iter().zip(&r.lower_bounds).enumerate() {
        println!("{:>4} {:>10.6} {:>12.6}", k + 1, x[0], nu);
    }
    println!("minimizer {:.6}, value {:.6}", r.x[0], r.value);
    Ok(())
}
