use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{MilpProblem, Sense};
use crate::model::Model;
use crate::stage::{ScenarioOverride, StageTemplate};
use crate::tree::StagewiseScenarios;

/// One-dimensional discounted control problem: `x_t = x_{t-1} + c_t + noise`
/// with `c_t` in `{-1, 1}` and cost `beta^(t-1) |x_t|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControlProblemSpec {
    pub horizon: usize,
    pub beta: f64,
    pub x0: f64,
    /// Noise values for stages 2..T, equiprobable.
    pub noise: Vec<f64>,
    /// Half-width of the smallest state box.
    pub box_half_width: f64,
}

impl Default for ControlProblemSpec {
    fn default() -> Self {
        Self {
            horizon: 8,
            beta: 0.9,
            x0: 2.0,
            noise: vec![-2.7, -2.1, -1.5, -0.9, -0.3, 0.3, 0.9, 1.5, 2.1, 2.7],
            box_half_width: 6.0,
        }
    }
}

impl ControlProblemSpec {
    /// State box half-widths for stages `0..=T`. Each box holds every state
    /// reachable from the previous box by the best control, so the stage
    /// problems stay feasible.
    pub fn box_half_widths(&self) -> Vec<f64> {
        let worst = self.noise.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut widths = vec![self.box_half_width.max(self.x0.abs())];
        for t in 1..=self.horizon {
            let noise = if t == 1 { 0.0 } else { worst };
            let prev = widths[t - 1];
            widths.push(self.box_half_width.max((prev - 1.0).max(1.0) + noise));
        }
        widths
    }

    /// Lipschitz constant of the expected cost-to-go after stage `t`:
    /// `sum over tau in t+1..=T of beta^(tau-1)`.
    pub fn ctg_lipschitz(&self, t: usize) -> f64 {
        (t + 1..=self.horizon).map(|tau| self.beta.powi(tau as i32 - 1)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || !(self.beta >= 0.0) || self.noise.is_empty() {
            return Err(Error::InvalidConfig("control spec needs T >= 1, beta >= 0 and noise".into()));
        }
        let mut sorted = self.noise.clone();
        sorted.sort_by(f64::total_cmp);
        let symmetric = sorted
            .iter()
            .zip(sorted.iter().rev())
            .all(|(a, b)| (a + b).abs() <= 1e-12);
        if !symmetric {
            return Err(Error::InvalidConfig("noise set is not symmetric about 0".into()));
        }
        Ok(())
    }
}

/// Stage templates and stagewise scenarios of the control problem. Stage 1
/// is deterministic.
pub fn gen_control1d(spec: &ControlProblemSpec) -> Result<Model> {
    spec.validate()?;
    let widths = spec.box_half_widths();
    let mut templates = Vec::with_capacity(spec.horizon);
    let mut stages = Vec::with_capacity(spec.horizon);
    for t in 1..=spec.horizon {
        let (b_in, b_out) = (widths[t - 1], widths[t]);
        let discount = spec.beta.powi(t as i32 - 1);
        // Variables: x, z (copy), b (control bit), s+, s-.
        let mut p = MilpProblem::new(5);
        p.lower = vec![-b_out, -b_in, 0.0, 0.0, 0.0];
        p.upper = vec![b_out, b_in, 1.0, b_out, b_out];
        p.integer[2] = true;
        p.objective = vec![0.0, 0.0, 0.0, discount, discount];
        // x - z - 2b = -1 (+ noise)
        p.add_row(&[(0, 1.0), (1, -1.0), (2, -2.0)], Sense::Eq, -1.0);
        // x - s+ + s- = 0
        p.add_row(&[(0, 1.0), (3, -1.0), (4, 1.0)], Sense::Eq, 0.0);
        let noise: Vec<f64> = if t == 1 { vec![0.0] } else { spec.noise.clone() };
        stages.push(noise.len());
        templates.push(StageTemplate {
            problem: p,
            state_vars: vec![0],
            copy_vars: vec![1],
            state_lower: vec![-b_out],
            state_upper: vec![b_out],
            scenarios: noise
                .iter()
                .map(|&xi| ScenarioOverride {
                    rhs: vec![(0, xi)],
                    objective: vec![],
                })
                .collect(),
            lipschitz: Some(discount),
        });
    }
    Ok(Model {
        templates,
        scenarios: StagewiseScenarios::uniform(&stages),
        initial_state: vec![spec.x0],
        floors: vec![0.0; spec.horizon - 1],
        rho_hint: Some((1..spec.horizon).map(|t| spec.ctg_lipschitz(t)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{CutPool, PoolOwner};
    use crate::milp::SolverOptions;
    use crate::stage::{solve_stage, Site};

    #[test]
    fn default_model_is_valid() {
        let m = gen_control1d(&ControlProblemSpec::default()).unwrap();
        m.validate().unwrap();
        assert_eq!(m.scenarios.tree_size(), 11_111_111.0);
        let h = m.rho_hint.unwrap();
        // 0.9 + 0.9^2 + ... + 0.9^7
        assert!((h[0] - 4.6953279).abs() < 1e-6);
        assert!((h[6] - 0.4782969).abs() < 1e-6);
    }

    #[test]
    fn rejects_asymmetric_noise() {
        let spec = ControlProblemSpec {
            noise: vec![-1.0, 2.0],
            ..ControlProblemSpec::default()
        };
        assert!(gen_control1d(&spec).is_err());
    }

    #[test]
    fn boxes_absorb_drift() {
        let w = ControlProblemSpec::default().box_half_widths();
        assert_eq!(w[0], 6.0);
        assert_eq!(w[1], 6.0);
        assert!((w[2] - 7.7).abs() < 1e-12);
    }

    #[test]
    fn first_stage_moves_toward_zero() {
        let m = gen_control1d(&ControlProblemSpec::default()).unwrap();
        let pool = CutPool::new(PoolOwner::Stage(1), 0.0);
        let s = solve_stage(&m.templates[0], 0, &[2.0], &pool, false, Site::default(), &SolverOptions::default())
            .unwrap();
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!((s.state[0] - 1.0).abs() < 1e-9);
    }
}
