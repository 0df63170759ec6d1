mod common;

use proptest::prelude::*;
use sldp::milp::{enumerate_milp, solve_lp, solve_milp, MilpProblem, Sense, SolverOptions, Status};

fn caroe_second_stage_lp() -> MilpProblem {
    let mut p = MilpProblem::new(4);
    p.objective = vec![-16.0, -19.0, -23.0, -28.0];
    p.upper = vec![1.0; 4];
    p.add_row(&[(0, 2.0), (1, 3.0), (2, 4.0), (3, 5.0)], Sense::Le, 5.0);
    p.add_row(&[(0, 6.0), (1, 1.0), (2, 3.0), (3, 2.0)], Sense::Le, 5.0);
    p
}

#[test]
fn caroe_lp_relaxation_matches_vertex_enumeration() {
    let p = caroe_second_stage_lp();
    let oracle = common::lp_by_vertices(&p).unwrap();
    let lp = solve_lp(&p, &SolverOptions::default()).unwrap();
    assert_eq!(lp.status, Status::Optimal);
    assert!((lp.objective - oracle).abs() < 1e-9);
    // Frozen from the vertex oracle above.
    assert!((lp.objective - (-431.0 / 13.0)).abs() < 1e-9);
}

fn dual_gap(p: &MilpProblem, sol: &sldp::milp::LpSolution) -> f64 {
    // Lagrangian bound: y^T b + sum_j min over the box of d_j x_j.
    let mut bound: f64 = p.rows.iter().zip(&sol.duals).map(|(r, y)| r.rhs * y).sum();
    for j in 0..p.num_vars() {
        let d = sol.reduced_costs[j];
        bound += if d >= 0.0 { d * p.lower[j] } else { d * p.upper[j] };
    }
    sol.objective - bound
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn branch_and_bound_matches_enumeration(seed in any::<u64>(), ni in 1usize..=8, nc in 0usize..=2) {
        let p = common::random_milp(seed, ni, nc);
        let opts = SolverOptions::default();
        let bb = solve_milp(&p, &opts).unwrap();
        let en = enumerate_milp(&p, &opts).unwrap();
        prop_assert_eq!(bb.status, en.status);
        prop_assert!((bb.objective - en.objective).abs() <= 1e-6,
            "b&b {} vs enumeration {}", bb.objective, en.objective);
        prop_assert!(p.max_violation(&bb.x) <= opts.feas_tol);
        for j in 0..p.num_vars() {
            if p.integer[j] {
                prop_assert!((bb.x[j] - bb.x[j].round()).abs() <= opts.int_tol);
            }
        }
        prop_assert!(bb.objective >= bb.best_bound - opts.feas_tol);
    }

    #[test]
    fn lp_dual_certificate_and_vertex_oracle(seed in any::<u64>(), n in 1usize..=4) {
        let mut p = common::random_milp(seed, 0, n);
        p.integer.iter_mut().for_each(|b| *b = false);
        let sol = solve_lp(&p, &SolverOptions::default()).unwrap();
        prop_assert_eq!(sol.status, Status::Optimal);
        prop_assert!(p.max_violation(&sol.x) <= 1e-7);
        prop_assert!(dual_gap(&p, &sol).abs() <= 1e-7 * (1.0 + sol.objective.abs()));
        for (r, y) in p.rows.iter().zip(&sol.duals) {
            match r.sense {
                Sense::Ge => prop_assert!(*y >= -1e-9),
                Sense::Le => prop_assert!(*y <= 1e-9),
                Sense::Eq => {}
            }
        }
        let oracle = common::lp_by_vertices(&p).unwrap();
        prop_assert!((sol.objective - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()));
    }

    #[test]
    fn repeated_solves_are_identical(seed in any::<u64>()) {
        let p = common::random_milp(seed, 5, 2);
        let opts = SolverOptions::default();
        let a = solve_milp(&p, &opts).unwrap();
        let b = solve_milp(&p, &opts).unwrap();
        prop_assert_eq!(a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
