#![allow(dead_code)]

pub mod checks;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sldp::milp::{MilpProblem, Sense};
use sldp::model::Model;
use sldp::stage::{ScenarioOverride, StageTemplate};
use sldp::tree::{Scenario, StagewiseScenarios};

/// Random bounded MILP with a known feasible point, built from `seed`.
pub fn random_milp(seed: u64, num_int: usize, num_cont: usize) -> MilpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = num_int + num_cont;
    let mut p = MilpProblem::new(n);
    let mut point = vec![0.0; n];
    for j in 0..n {
        p.objective[j] = rng.gen_range(-10..=10) as f64;
        if j < num_int {
            let lo = rng.gen_range(-2..=0) as f64;
            let hi = lo + rng.gen_range(1..=3) as f64;
            p.lower[j] = lo;
            p.upper[j] = hi;
            p.integer[j] = true;
            point[j] = rng.gen_range(lo as i64..=hi as i64) as f64;
        } else {
            p.lower[j] = 0.0;
            p.upper[j] = rng.gen_range(1.0..6.0);
            point[j] = rng.gen_range(0.0..p.upper[j]);
        }
    }
    let m = rng.gen_range(2..=5);
    for _ in 0..m {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.6) {
                terms.push((j, rng.gen_range(-6..=6) as f64));
            }
        }
        let act: f64 = terms.iter().map(|&(j, a)| a * point[j]).sum();
        match rng.gen_range(0..5) {
            0 => p.add_row(&terms, Sense::Eq, act),
            1 | 2 => p.add_row(&terms, Sense::Ge, act - rng.gen_range(0..4) as f64),
            _ => p.add_row(&terms, Sense::Le, act + rng.gen_range(0..4) as f64),
        };
    }
    p
}

/// Dense Gaussian elimination with partial pivoting; `None` if singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let r = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[r][c].abs() < 1e-10 {
            return None;
        }
        a.swap(r, c);
        b.swap(r, c);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    for k in c..n {
                        a[i][k] -= f * a[c][k];
                    }
                    b[i] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum of a bounded LP by enumerating every basic solution.
pub fn lp_by_vertices(p: &MilpProblem) -> Option<f64> {
    let n = p.num_vars();
    // Each candidate active constraint is (coefficients, rhs).
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in &p.rows {
        cons.push((r.coefficients.clone(), r.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), p.lower[j]));
        cons.push((e, p.upper[j]));
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    fn rec(
        start: usize,
        pick: &mut Vec<usize>,
        n: usize,
        cons: &[(Vec<f64>, f64)],
        p: &MilpProblem,
        best: &mut Option<f64>,
    ) {
        if pick.len() == n {
            let a = pick.iter().map(|&i| cons[i].0.clone()).collect();
            let b = pick.iter().map(|&i| cons[i].1).collect();
            if let Some(x) = solve_dense(a, b) {
                if p.max_violation(&x) <= 1e-9 {
                    let v = p.objective_value(&x);
                    if best.map_or(true, |b| v < b) {
                        *best = Some(v);
                    }
                }
            }
            return;
        }
        for i in start..cons.len() {
            pick.push(i);
            rec(i + 1, pick, n, cons, p, best);
            pick.pop();
        }
    }
    rec(0, &mut pick, n, &cons, p, &mut best);
    best
}

/// Random multistage model with integer states in `[0, u]^d`, slack-absorbed
/// tracking rows (so every incoming state is feasible) and `2..=3`
/// scenarios per stage. The slack penalty of stage `t` bounds the Lipschitz
/// constant of its cost-to-go and is stored as the opening hint of stage
/// `t - 1`.
pub fn random_model(seed: u64, horizon: usize, d: usize) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = rng.gen_range(2..=3) as f64;
    let slack = 2.0 * u + 4.0;
    let mut templates = Vec::new();
    let mut stages = Vec::new();
    let mut penalties = Vec::new();
    let mut min_costs = Vec::new();
    for t in 1..=horizon {
        let copies = if t == 1 { 0 } else { d };
        // x (d), z (copies), s+ (d), s- (d), w, y
        let n = 3 * d + copies + 2;
        let mut p = MilpProblem::new(n);
        let (zx, sp, sm) = (d, d + copies, 2 * d + copies);
        let (w, y) = (3 * d + copies, 3 * d + copies + 1);
        let pen = rng.gen_range(2..=5) as f64;
        penalties.push(pen);
        for i in 0..d {
            p.objective[i] = rng.gen_range(-3..=3) as f64;
            p.upper[i] = u;
            p.integer[i] = true;
            p.objective[sp + i] = pen;
            p.objective[sm + i] = pen;
            p.upper[sp + i] = slack;
            p.upper[sm + i] = slack;
        }
        for k in 0..copies {
            p.upper[zx + k] = u;
        }
        p.objective[w] = rng.gen_range(-2..=2) as f64;
        p.upper[w] = 2.0;
        p.integer[w] = true;
        p.objective[y] = rng.gen_range(0..=2) as f64;
        p.upper[y] = 3.0;
        for i in 0..d {
            let mut terms = vec![(i, 1.0), (sp + i, 1.0), (sm + i, -1.0)];
            if copies > 0 {
                terms.push((zx + i, -1.0));
            }
            p.add_row(&terms, Sense::Eq, 0.0);
        }
        let a: Vec<f64> = (0..d).map(|_| rng.gen_range(0..=2) as f64).collect();
        let b = rng.gen_range(1..=2) as f64;
        let mut terms: Vec<(usize, f64)> = a.iter().enumerate().map(|(i, &ai)| (i, ai)).collect();
        terms.push((w, -b));
        terms.push((y, -1.0));
        let r = a.iter().sum::<f64>() * u - 3.0 + rng.gen_range(0..=2) as f64;
        p.add_row(&terms, Sense::Le, r);
        min_costs.push(
            (0..n)
                .map(|j| (p.objective[j] * p.lower[j]).min(p.objective[j] * p.upper[j]))
                .sum::<f64>(),
        );

        let count = if t == 1 { 1 } else { rng.gen_range(2..=3) };
        let mut weights: Vec<f64> = (0..count).map(|_| rng.gen_range(1..=4) as f64).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let head: f64 = weights[..count - 1].iter().sum();
        weights[count - 1] = 1.0 - head;
        let mut overrides = Vec::new();
        let mut list = Vec::new();
        for (k, &q) in weights.iter().enumerate() {
            let rhs = (0..d)
                .map(|i| (i, rng.gen_range(-2..=2 * u as i64 + 2) as f64 * 0.5))
                .collect();
            let objective = vec![(w, rng.gen_range(-1..=1) as f64)];
            overrides.push(ScenarioOverride { rhs, objective });
            list.push(Scenario {
                payload: k,
                probability: q,
            });
        }
        templates.push(StageTemplate {
            problem: p,
            state_vars: (0..d).collect(),
            copy_vars: (zx..zx + copies).collect(),
            state_lower: vec![0.0; d],
            state_upper: vec![u; d],
            scenarios: overrides,
            lipschitz: Some(pen),
        });
        stages.push(list);
    }
    // Each scenario may shift the objective of `w` by one unit.
    let floors = (1..horizon)
        .map(|t| min_costs[t..].iter().sum::<f64>() - 2.0 * (horizon - t) as f64)
        .collect();
    Model {
        templates,
        scenarios: StagewiseScenarios::new(stages),
        initial_state: vec![],
        floors,
        rho_hint: Some(penalties[1..].to_vec()),
    }
}
