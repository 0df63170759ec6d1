use serde::{Deserialize, Serialize};

use crate::cuts::{rho_schedule, CutFamily, RhoSchedule};
use crate::error::{Error, Result};
use crate::milp::SolverOptions;
use crate::model::Model;
use crate::tree::DEFAULT_NODE_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every node is visited in every iteration.
    Full,
    /// One sampled path per iteration.
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "sampled" => Ok(Self::Sampled),
            _ => Err(Error::InvalidConfig(format!("unknown mode '{s}'"))),
        }
    }
}

/// Whether cut pools and forward histories belong to tree nodes or to
/// whole stages. Stage sharing is only sound for stagewise-independent
/// scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolSharing {
    PerNode,
    PerStage,
}

/// Opening of the cuts added to the pool of a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoRule {
    /// Constant opening per stage `1..T-1`.
    PerStage { values: Vec<f64> },
    /// Iteration-dependent opening, the same for all stages.
    Schedule(RhoSchedule),
    /// The model's suggested per-stage openings.
    Hint,
}

impl Default for RhoRule {
    fn default() -> Self {
        Self::Schedule(RhoSchedule::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SldpConfig {
    pub mode: Mode,
    pub cuts: CutFamily,
    pub rho: RhoRule,
    /// Stabilization radius of sampled runs.
    pub delta: f64,
    /// Overrides the model floors for stages `1..T-1`.
    pub floors: Option<Vec<f64>>,
    pub max_iterations: usize,
    /// Relative lower-bound improvement below which a run stops; 0 disables.
    pub stop_tolerance: f64,
    pub stop_window: usize,
    pub seed: u64,
    /// Forward passes used to estimate the policy cost after a run.
    pub sim_samples: usize,
    /// Defaults to per-node pools when the tree is materialized.
    pub pool_sharing: Option<PoolSharing>,
    /// Largest tree that is materialized.
    pub node_cap: usize,
    /// Skip cuts dominated by an existing cut at the same center.
    pub skip_dominated: bool,
    /// Lipschitz bound on the stage value functions, used for the
    /// sampled-run accuracy bound.
    pub lipschitz_bound: Option<f64>,
    /// Record wall-clock times; off for byte-identical logs.
    pub timing: bool,
    pub solver: SolverOptions,
}

impl Default for SldpConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            cuts: CutFamily::StrengthenedAugBenders,
            rho: RhoRule::default(),
            delta: 0.0,
            floors: None,
            max_iterations: 100,
            stop_tolerance: 0.0,
            stop_window: 5,
            seed: 0,
            sim_samples: 0,
            pool_sharing: None,
            node_cap: DEFAULT_NODE_CAP,
            skip_dominated: true,
            lipschitz_bound: None,
            timing: true,
            solver: SolverOptions::default(),
        }
    }
}

impl SldpConfig {
    pub fn validate(&self, model: &Model) -> Result<()> {
        let t = model.horizon();
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidConfig(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(self.stop_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("stop tolerance must be >= 0".into()));
        }
        if let Some(f) = &self.floors {
            if f.len() + 1 < t || f.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("need {} finite floors", t - 1)));
            }
        }
        match &self.rho {
            RhoRule::PerStage { values } => {
                if values.len() + 1 < t || values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidConfig(format!("need {} nonnegative openings", t - 1)));
                }
            }
            RhoRule::Schedule(s) => {
                if !(s.rho0 > 0.0) || !(s.gamma >= 1.0) || !(s.rho_max >= 0.0) {
                    return Err(Error::InvalidConfig("schedule needs rho0 > 0 and gamma >= 1".into()));
                }
            }
            RhoRule::Hint => {
                if model.rho_hint.is_none() && t > 1 {
                    return Err(Error::InvalidConfig("model has no opening hint".into()));
                }
            }
        }
        Ok(())
    }

    /// Opening for cuts on the expected cost-to-go of `stage` in 0-based
    /// iteration `k`.
    pub fn rho(&self, model: &Model, stage: usize, k: usize) -> f64 {
        match &self.rho {
            RhoRule::PerStage { values } => values[stage - 1],
            RhoRule::Schedule(s) => rho_schedule(k, s),
            RhoRule::Hint => model.rho_hint.as_ref().map_or(0.0, |h| h[stage - 1]),
        }
    }

    /// Floor of the stage-`t` pool.
    pub fn floor(&self, model: &Model, stage: usize) -> f64 {
        match &self.floors {
            Some(f) if stage < model.horizon() => f[stage - 1],
            _ => model.floor(stage),
        }
    }
}
