//! Exhaustive enumeration over the integer lattice.

use super::{solve_lp, MilpProblem, MilpSolution, SolverOptions, Status};
use crate::error::{Error, Result};

/// Exact optimum of `p` by trying every integer assignment, with an LP over
/// the continuous variables when any remain.
pub fn enumerate_milp(p: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution> {
    enumerate_milp_with(p, opts, |_| Ok(0.0))
}

/// Like [`enumerate_milp`], but each candidate's objective is increased by
/// `extra(x)` evaluated at that candidate's solution. Exact whenever `extra`
/// depends only on variables that are integer or uniquely determined by the
/// integer assignment.
pub fn enumerate_milp_with<F>(p: &MilpProblem, opts: &SolverOptions, mut extra: F) -> Result<MilpSolution>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    p.validate()?;
    let ints: Vec<usize> = (0..p.num_vars()).filter(|&j| p.integer[j]).collect();
    let ranges: Vec<(i64, i64)> = ints
        .iter()
        .map(|&j| ((p.lower[j] - opts.int_tol).ceil() as i64, (p.upper[j] + opts.int_tol).floor() as i64))
        .collect();
    let needed: f64 = ranges
        .iter()
        .map(|&(lo, hi)| ((hi - lo + 1).max(0)) as f64)
        .product();
    if needed > opts.enumeration_cap as f64 {
        return Err(Error::EnumerationCapExceeded {
            needed,
            cap: opts.enumeration_cap,
        });
    }
    let n = p.num_vars();
    let all_integer = ints.len() == n;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut count = 0usize;
    let mut unbounded = false;
    for assignment in integer_assignments(&ranges) {
        count += 1;
        let candidate = if all_integer {
            let x: Vec<f64> = assignment.iter().map(|&v| v as f64).collect();
            if p.max_violation(&x) > opts.feas_tol {
                None
            } else {
                Some((p.objective_value(&x), x))
            }
        } else {
            let mut q = p.clone();
            for (&j, &v) in ints.iter().zip(&assignment) {
                q.lower[j] = v as f64;
                q.upper[j] = v as f64;
                q.integer[j] = false;
            }
            let lp = solve_lp(&q, opts)?;
            match lp.status {
                Status::Optimal => Some((lp.objective, lp.x)),
                Status::Infeasible => None,
                Status::Unbounded => {
                    unbounded = true;
                    None
                }
            }
        };
        if let Some((obj, x)) = candidate {
            let total = obj + extra(&x)?;
            if best.as_ref().map_or(true, |(b, _)| total < *b - 1e-12) {
                best = Some((total, x));
            }
        }
    }
    if unbounded {
        return Ok(MilpSolution {
            status: Status::Unbounded,
            x: vec![f64::NAN; n],
            objective: f64::NEG_INFINITY,
            best_bound: f64::NEG_INFINITY,
            nodes: count,
        });
    }
    Ok(match best {
        Some((objective, x)) => MilpSolution {
            status: Status::Optimal,
            x,
            objective,
            best_bound: objective,
            nodes: count,
        },
        None => MilpSolution {
            status: Status::Infeasible,
            x: vec![f64::NAN; n],
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            nodes: count,
        },
    })
}

/// Lexicographic iterator over the box of integer points `ranges`.
pub fn integer_assignments(ranges: &[(i64, i64)]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let empty = ranges.iter().any(|&(lo, hi)| hi < lo);
    let mut current: Option<Vec<i64>> = if empty {
        None
    } else {
        Some(ranges.iter().map(|&(lo, _)| lo).collect())
    };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut k = next.len();
        loop {
            if k == 0 {
                current = None;
                break;
            }
            k -= 1;
            if next[k] < ranges[k].1 {
                next[k] += 1;
                current = Some(next);
                break;
            }
            next[k] = ranges[k].0;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Sense;

    #[test]
    fn lattice_iterator_counts() {
        let pts: Vec<_> = integer_assignments(&[(0, 1), (-1, 1)]).collect();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0, -1]);
        assert_eq!(pts[5], vec![1, 1]);
        assert_eq!(integer_assignments(&[]).count(), 1);
        assert_eq!(integer_assignments(&[(1, 0)]).count(), 0);
    }

    #[test]
    fn infeasible_instance() {
        let mut p = MilpProblem::new(1);
        p.upper[0] = 3.0;
        p.integer[0] = true;
        p.add_row(&[(0, 1.0)], Sense::Ge, 1.0);
        p.add_row(&[(0, 1.0)], Sense::Le, 0.0);
        assert_eq!(
            enumerate_milp(&p, &SolverOptions::default()).unwrap().status,
            Status::Infeasible
        );
    }

    #[test]
    fn pure_lp_equals_solve_lp() {
        let mut p = MilpProblem::new(2);
        p.objective = vec![-1.0, -2.0];
        p.upper = vec![3.0, 3.0];
        p.add_row(&[(0, 1.0), (1, 1.0)], Sense::Le, 4.0);
        let e = enumerate_milp(&p, &SolverOptions::default()).unwrap();
        let l = solve_lp(&p, &SolverOptions::default()).unwrap();
        assert!((e.objective - l.objective).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let mut p = MilpProblem::new(3);
        p.upper = vec![99.0; 3];
        p.integer = vec![true; 3];
        let opts = SolverOptions {
            enumeration_cap: 1000,
            ..SolverOptions::default()
        };
        assert!(matches!(
            enumerate_milp(&p, &opts),
            Err(Error::EnumerationCapExceeded { .. })
        ));
    }
}
