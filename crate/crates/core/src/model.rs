//! A multistage problem: one template per stage plus stagewise scenarios.

use crate::error::{Error, Result};
use crate::stage::StageTemplate;
use crate::tree::StagewiseScenarios;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    /// Stage templates, index 0 is stage 1.
    pub templates: Vec<StageTemplate>,
    pub scenarios: StagewiseScenarios,
    /// Incoming state of the first stage.
    pub initial_state: Vec<f64>,
    /// Lower bounds on the expected cost-to-go of stages `1..T-1`.
    pub floors: Vec<f64>,
    /// Suggested reverse-norm openings for stages `1..T-1`, when known.
    pub rho_hint: Option<Vec<f64>>,
}

impl Model {
    pub fn horizon(&self) -> usize {
        self.templates.len()
    }

    pub fn template(&self, stage: usize) -> &StageTemplate {
        &self.templates[stage - 1]
    }

    /// Floor of the stage-`t` pool; the last stage has no future cost.
    pub fn floor(&self, stage: usize) -> f64 {
        if stage >= self.horizon() {
            0.0
        } else {
            self.floors[stage - 1]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.horizon();
        if t == 0 {
            return Err(Error::MalformedProblem("model has no stages".into()));
        }
        if self.scenarios.horizon() != t {
            return Err(Error::MalformedProblem(format!(
                "{} scenario stages for {t} templates",
                self.scenarios.horizon()
            )));
        }
        self.scenarios.validate()?;
        for (i, tpl) in self.templates.iter().enumerate() {
            tpl.validate()?;
            let stage = i + 1;
            if let Some(s) = self
                .scenarios
                .stage(stage)
                .iter()
                .find(|s| s.payload >= tpl.scenarios.len())
            {
                return Err(Error::MalformedProblem(format!(
                    "stage {stage} references missing scenario payload {}",
                    s.payload
                )));
            }
            if stage > 1 && tpl.incoming_dim() != self.templates[i - 1].state_dim() {
                return Err(Error::MalformedProblem(format!(
                    "stage {stage} copies {} values but stage {} has {} states",
                    tpl.incoming_dim(),
                    stage - 1,
                    self.templates[i - 1].state_dim()
                )));
            }
        }
        if self.initial_state.len() != self.templates[0].incoming_dim() {
            return Err(Error::MalformedProblem("initial state dimension mismatch".into()));
        }
        if self.floors.len() + 1 < t || self.floors.iter().any(|f| !f.is_finite()) {
            return Err(Error::MalformedProblem(format!(
                "need {} finite floors, found {}",
                t - 1,
                self.floors.len()
            )));
        }
        if let Some(h) = &self.rho_hint {
            if h.len() + 1 < t {
                return Err(Error::MalformedProblem("rho hint is too short".into()));
            }
        }
        Ok(())
    }
}
