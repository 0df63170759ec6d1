//! Best-first branch-and-bound.
//!
//! Nodes are keyed on their parent's LP bound; among equal keys the most
//! recently created node is taken first. Branching picks the most fractional
//! integer variable, lowest index on ties. Each node runs activity-based bound
//! propagation before its LP, and re-solves with the dual simplex from the
//! parent's optimal basis.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;

use super::simplex::{LpOutcome, Tableau};
use super::{solve_lp, MilpProblem, MilpSolution, Sense, SolverOptions, Status};
use crate::error::{Error, Result};

struct Node {
    key: f64,
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    basis: Rc<Vec<usize>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: smallest key first, then newest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Row data in sparse form for propagation.
struct Propagator {
    rows: Vec<(Vec<(usize, f64)>, f64, f64)>,
    integer: Vec<bool>,
    int_tol: f64,
}

impl Propagator {
    fn new(p: &MilpProblem, int_tol: f64) -> Self {
        let rows = p
            .rows
            .iter()
            .map(|r| {
                let terms: Vec<(usize, f64)> = r
                    .coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a != 0.0)
                    .map(|(j, a)| (j, *a))
                    .collect();
                let (lo, hi) = match r.sense {
                    Sense::Le => (f64::NEG_INFINITY, r.rhs),
                    Sense::Ge => (r.rhs, f64::INFINITY),
                    Sense::Eq => (r.rhs, r.rhs),
                };
                (terms, lo, hi)
            })
            .collect();
        Self {
            rows,
            integer: p.integer.clone(),
            int_tol,
        }
    }

    /// Tightens `lower`/`upper` in place; returns false on proven infeasibility.
    fn propagate(&self, lower: &mut [f64], upper: &mut [f64]) -> bool {
        for _pass in 0..8 {
            let mut changed = false;
            for (terms, rlo, rhi) in &self.rows {
                // Activity bounds with counts of infinite contributions.
                let (mut min_act, mut max_act) = (0.0, 0.0);
                let (mut min_inf, mut max_inf) = (0usize, 0usize);
                for &(j, a) in terms {
                    let (lo_c, hi_c) = if a > 0.0 {
                        (a * lower[j], a * upper[j])
                    } else {
                        (a * upper[j], a * lower[j])
                    };
                    if lo_c.is_finite() {
                        min_act += lo_c;
                    } else {
                        min_inf += 1;
                    }
                    if hi_c.is_finite() {
                        max_act += hi_c;
                    } else {
                        max_inf += 1;
                    }
                }
                if min_inf == 0 && min_act > rhi + 1e-9 * (1.0 + rhi.abs()) {
                    return false;
                }
                if max_inf == 0 && max_act < rlo - 1e-9 * (1.0 + rlo.abs()) {
                    return false;
                }
                for &(j, a) in terms {
                    let (lo_c, hi_c) = if a > 0.0 {
                        (a * lower[j], a * upper[j])
                    } else {
                        (a * upper[j], a * lower[j])
                    };
                    // Residual activity of the other terms.
                    let rest_min = if lo_c.is_finite() {
                        (min_inf == 0).then(|| min_act - lo_c)
                    } else {
                        (min_inf == 1).then_some(min_act)
                    };
                    let rest_max = if hi_c.is_finite() {
                        (max_inf == 0).then(|| max_act - hi_c)
                    } else {
                        (max_inf == 1).then_some(max_act)
                    };
                    // a x_j <= rhi - rest_min, a x_j >= rlo - rest_max
                    let mut new_lo = lower[j];
                    let mut new_hi = upper[j];
                    if let (Some(rm), true) = (rest_min, rhi.is_finite()) {
                        let bound = (rhi - rm) / a;
                        if a > 0.0 {
                            new_hi = new_hi.min(bound);
                        } else {
                            new_lo = new_lo.max(bound);
                        }
                    }
                    if let (Some(rm), true) = (rest_max, rlo.is_finite()) {
                        let bound = (rlo - rm) / a;
                        if a > 0.0 {
                            new_lo = new_lo.max(bound);
                        } else {
                            new_hi = new_hi.min(bound);
                        }
                    }
                    if self.integer[j] {
                        new_lo = (new_lo - self.int_tol).ceil();
                        new_hi = (new_hi + self.int_tol).floor();
                    } else {
                        let slack = 1e-9 * (1.0 + new_lo.abs().max(new_hi.abs()).min(1e12));
                        new_lo -= slack;
                        new_hi += slack;
                    }
                    if new_lo > upper[j] + 1e-9 * (1.0 + upper[j].abs())
                        || new_hi < lower[j] - 1e-9 * (1.0 + lower[j].abs())
                    {
                        return false;
                    }
                    let width = upper[j] - lower[j];
                    let significant = |gain: f64| {
                        if self.integer[j] {
                            gain > 0.5
                        } else {
                            gain > 1e-6 * (1.0 + width.min(1e12).abs()) && gain > 1e-3 * width.min(1e12)
                        }
                    };
                    if new_lo > lower[j] && (!lower[j].is_finite() || significant(new_lo - lower[j]))
                    {
                        lower[j] = new_lo.min(upper[j]);
                        changed = true;
                    }
                    if new_hi < upper[j] && (!upper[j].is_finite() || significant(upper[j] - new_hi))
                    {
                        upper[j] = new_hi.max(lower[j]);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        true
    }
}

/// Most fractional variable of the highest branching class, lowest index on
/// ties.
fn most_fractional(x: &[f64], integer: &[bool], priority: &[u8], int_tol: f64) -> Option<usize> {
    let mut best: Option<(usize, u8, f64)> = None;
    for (j, (&v, &is_int)) in x.iter().zip(integer).enumerate() {
        if !is_int {
            continue;
        }
        let f = v - v.floor();
        let dist = f.min(1.0 - f);
        if dist <= int_tol {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, bp, d)) => priority[j] > bp || (priority[j] == bp && dist > d + 1e-12),
        };
        if better {
            best = Some((j, priority[j], dist));
        }
    }
    best.map(|(j, _, _)| j)
}

/// Solves `p` to global optimality by branch-and-bound.
pub fn solve_milp(p: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution> {
    p.validate()?;
    if !p.has_integers() {
        let lp = solve_lp(p, opts)?;
        return Ok(MilpSolution {
            status: lp.status,
            best_bound: lp.objective,
            x: lp.x,
            objective: lp.objective,
            nodes: 1,
        });
    }
    let n = p.num_vars();
    let prop = Propagator::new(p, opts.int_tol);
    let mut tableau = Tableau::new(p, opts);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node {
        key: f64::NEG_INFINITY,
        seq,
        lower: p.lower.clone(),
        upper: p.upper.clone(),
        basis: Rc::new(tableau.basis().to_vec()),
    });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut unbounded = false;

    while let Some(mut node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if node.key >= inc - opts.gap_tol {
                continue;
            }
        }
        nodes += 1;
        if nodes > opts.node_limit {
            return Err(Error::NodeLimitExceeded(opts.node_limit));
        }
        if !prop.propagate(&mut node.lower, &mut node.upper) {
            continue;
        }
        tableau.load_basis(&node.basis);
        tableau.set_structural_bounds(&node.lower, &node.upper);
        if tableau.solve()? == LpOutcome::Infeasible {
            continue;
        }
        if tableau.rests_on_artificial_bound() {
            unbounded = true;
            break;
        }
        let obj = tableau.objective();
        if let Some((inc, _)) = &incumbent {
            if obj >= inc - opts.gap_tol {
                continue;
            }
        }
        let x = tableau.values().to_vec();
        match most_fractional(&x, &p.integer, &p.branch_priority, opts.int_tol) {
            None => {
                let drifted = (0..n).any(|j| p.integer[j] && x[j] != x[j].round());
                if !drifted {
                    incumbent = Some((obj, x));
                    continue;
                }
                // Pin the integers and re-solve so the continuous part matches them exactly.
                let mut lower = node.lower.clone();
                let mut upper = node.upper.clone();
                for j in 0..n {
                    if p.integer[j] {
                        lower[j] = x[j].round();
                        upper[j] = lower[j];
                    }
                }
                tableau.set_structural_bounds(&lower, &upper);
                let (obj, mut sol) = if tableau.solve()? == LpOutcome::Optimal {
                    (tableau.objective(), tableau.values().to_vec())
                } else {
                    (obj, x)
                };
                for j in 0..n {
                    if p.integer[j] {
                        sol[j] = lower[j];
                    }
                }
                if incumbent.as_ref().map_or(true, |(inc, _)| obj < *inc) {
                    incumbent = Some((obj, sol));
                }
            }
            Some(j) => {
                let v = x[j];
                let basis = Rc::new(tableau.basis().to_vec());
                let mut down = Node {
                    key: obj,
                    seq: 0,
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                    basis: Rc::clone(&basis),
                };
                down.upper[j] = v.floor();
                let mut up = Node {
                    key: obj,
                    seq: 0,
                    lower: node.lower,
                    upper: node.upper,
                    basis,
                };
                up.lower[j] = v.ceil();
                // The child on the rounding side is pushed last so it is explored first.
                let (first, second) = if v - v.floor() > 0.5 {
                    (down, up)
                } else {
                    (up, down)
                };
                for mut child in [first, second] {
                    seq += 1;
                    child.seq = seq;
                    heap.push(child);
                }
            }
        }
    }

    if unbounded {
        return Ok(MilpSolution {
            status: Status::Unbounded,
            x: tableau.values().to_vec(),
            objective: f64::NEG_INFINITY,
            best_bound: f64::NEG_INFINITY,
            nodes,
        });
    }
    Ok(match incumbent {
        Some((objective, x)) => MilpSolution {
            status: Status::Optimal,
            x,
            objective,
            best_bound: objective,
            nodes,
        },
        None => MilpSolution {
            status: Status::Infeasible,
            x: vec![f64::NAN; n],
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            nodes,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knapsack(rhs: (f64, f64)) -> MilpProblem {
        let mut p = MilpProblem::new(4);
        p.objective = vec![-16.0, -19.0, -23.0, -28.0];
        p.upper = vec![1.0; 4];
        p.integer = vec![true; 4];
        p.add_row(&[(0, 2.0), (1, 3.0), (2, 4.0), (3, 5.0)], Sense::Le, rhs.0);
        p.add_row(&[(0, 6.0), (1, 1.0), (2, 3.0), (3, 2.0)], Sense::Le, rhs.1);
        p
    }

    #[test]
    fn two_row_knapsack() {
        let s = solve_milp(&knapsack((5.0, 5.0)), &SolverOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective + 28.0).abs() < 1e-9);
        assert_eq!(s.x, vec![0.0, 0.0, 0.0, 1.0]);
        assert!(s.objective >= s.best_bound - 1e-7);
    }

    #[test]
    fn zero_capacity_knapsack() {
        let s = solve_milp(&knapsack((0.0, 0.0)), &SolverOptions::default()).unwrap();
        assert!(s.objective.abs() < 1e-12);
        assert_eq!(s.x, vec![0.0; 4]);
    }

    #[test]
    fn node_limit_is_enforced() {
        let opts = SolverOptions {
            node_limit: 1,
            ..SolverOptions::default()
        };
        let r = solve_milp(&knapsack((5.0, 5.0)), &opts);
        assert!(matches!(r, Err(Error::NodeLimitExceeded(1))));
    }

    #[test]
    fn propagation_fixes_implied_binary() {
        // u <= 4 z, u >= x - 1, x >= 2  =>  z = 1
        let mut p = MilpProblem::new(3);
        p.upper = vec![4.0, 1.0, 3.0];
        p.integer = vec![false, true, false];
        p.lower[2] = 2.0;
        p.add_row(&[(0, 1.0), (1, -4.0)], Sense::Le, 0.0);
        p.add_row(&[(0, 1.0), (2, -1.0)], Sense::Ge, -1.0);
        let prop = Propagator::new(&p, 1e-6);
        let (mut lo, mut hi) = (p.lower.clone(), p.upper.clone());
        assert!(prop.propagate(&mut lo, &mut hi));
        assert_eq!(lo[1], 1.0);
    }

    #[test]
    fn deterministic_primal_vectors() {
        let p = knapsack((7.0, 6.0));
        let a = solve_milp(&p, &SolverOptions::default()).unwrap();
        let b = solve_milp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.nodes, b.nodes);
    }
}
