use serde::{Deserialize, Serialize};

use crate::milp::{MilpProblem, Sense};
use crate::model::Model;
use crate::stage::{ScenarioOverride, StageTemplate};
use crate::tree::StagewiseScenarios;

/// Second-stage objective coefficients.
pub const CAROE_Y_COSTS: [f64; 4] = [-16.0, -19.0, -23.0, -28.0];

/// Second-stage row coefficients.
pub const CAROE_ROW_WEIGHTS: [[f64; 4]; 2] = [[2.0, 3.0, 4.0, 5.0], [6.0, 1.0, 3.0, 2.0]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaroeSchultzSpec {
    /// Grid points per axis.
    pub n: usize,
    pub discrete_first_stage: bool,
}

/// `n` equally spaced points on `[5, 15]`, ends included.
pub fn caroe_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![10.0];
    }
    (0..n).map(|i| 5.0 + 10.0 * i as f64 / (n - 1) as f64).collect()
}

/// Two-stage instance with `n^2` equiprobable second-stage scenarios.
pub fn gen_caroe_schultz(spec: &CaroeSchultzSpec) -> Model {
    let mut first = MilpProblem::new(2);
    first.objective = vec![-1.5, -4.0];
    first.upper = vec![5.0, 5.0];
    first.integer = vec![spec.discrete_first_stage; 2];
    let first = StageTemplate {
        problem: first,
        state_vars: vec![0, 1],
        copy_vars: vec![],
        state_lower: vec![0.0, 0.0],
        state_upper: vec![5.0, 5.0],
        scenarios: vec![ScenarioOverride::default()],
        lipschitz: Some(4.0),
    };

    // Variables: y1..y4 (binary), then copies of x1, x2.
    let mut second = MilpProblem::new(6);
    second.objective[..4].copy_from_slice(&CAROE_Y_COSTS);
    for j in 0..4 {
        second.upper[j] = 1.0;
        second.integer[j] = true;
    }
    second.upper[4] = 5.0;
    second.upper[5] = 5.0;
    for (r, w) in CAROE_ROW_WEIGHTS.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = w.iter().enumerate().map(|(j, &a)| (j, a)).collect();
        terms.push((4 + r, 1.0));
        second.add_row(&terms, Sense::Le, 0.0);
    }
    let grid = caroe_grid(spec.n);
    let mut overrides = Vec::with_capacity(spec.n * spec.n);
    for &w1 in &grid {
        for &w2 in &grid {
            overrides.push(ScenarioOverride {
                rhs: vec![(0, w1), (1, w2)],
                objective: vec![],
            });
        }
    }
    let second = StageTemplate {
        problem: second,
        state_vars: vec![],
        copy_vars: vec![4, 5],
        state_lower: vec![],
        state_upper: vec![],
        scenarios: overrides,
        lipschitz: Some(0.0),
    };
    let floor = CAROE_Y_COSTS.iter().sum::<f64>();
    Model {
        templates: vec![first, second],
        scenarios: StagewiseScenarios::uniform(&[1, spec.n * spec.n]),
        initial_state: vec![],
        floors: vec![floor],
        rho_hint: None,
    }
}
