//! JSON problem files and run artifacts.
//!
//! A problem file holds the stage templates, the stagewise scenarios with
//! their rhs/objective deltas, the initial state, the pool floors and an
//! optional engine configuration. Missing or `null` variable bounds are
//! infinite.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{RunResult, SldpConfig};
use crate::error::{Error, Result};
use crate::milp::{MilpProblem, Sense};
use crate::model::Model;
use crate::stage::{ScenarioOverride, StageTemplate};
use crate::tree::{check_distribution, Scenario, StagewiseScenarios};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub initial_state: Vec<f64>,
    /// Cost-to-go floors for stages `1..T-1`.
    pub floors: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_hint: Option<Vec<f64>>,
    pub templates: Vec<TemplateFile>,
    /// One list of realizations per stage.
    pub scenarios: Vec<Vec<ScenarioFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SldpConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateFile {
    pub variables: Vec<VariableFile>,
    pub rows: Vec<RowFile>,
    pub state_vars: Vec<usize>,
    pub copy_vars: Vec<usize>,
    pub state_lower: Vec<f64>,
    pub state_upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableFile {
    #[serde(default)]
    pub cost: f64,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowFile {
    /// `(variable, coefficient)` pairs.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub probability: f64,
    /// `(row, amount added to its rhs)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rhs: Vec<(usize, f64)>,
    /// `(variable, amount added to its cost)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective: Vec<(usize, f64)>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::MalformedProblem(format!("at {path}: {}", e.into_inner()))
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::MalformedProblem(format!(
                "at schema_version: unsupported version {}",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MalformedProblem(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// File for `model` with one payload per realization.
    pub fn from_model(model: &Model, config: Option<SldpConfig>) -> Self {
        let templates = model
            .templates
            .iter()
            .map(|t| {
                let p = &t.problem;
                TemplateFile {
                    variables: (0..p.num_vars())
                        .map(|j| VariableFile {
                            cost: p.objective[j],
                            lower: finite(p.lower[j]),
                            upper: finite(p.upper[j]),
                            integer: p.integer[j],
                        })
                        .collect(),
                    rows: p
                        .rows
                        .iter()
                        .map(|r| RowFile {
                            terms: r
                                .coefficients
                                .iter()
                                .enumerate()
                                .filter(|(_, a)| **a != 0.0)
                                .map(|(j, a)| (j, *a))
                                .collect(),
                            sense: r.sense,
                            rhs: r.rhs,
                        })
                        .collect(),
                    state_vars: t.state_vars.clone(),
                    copy_vars: t.copy_vars.clone(),
                    state_lower: t.state_lower.clone(),
                    state_upper: t.state_upper.clone(),
                    lipschitz: t.lipschitz,
                }
            })
            .collect();
        let scenarios = model
            .scenarios
            .stages
            .iter()
            .zip(&model.templates)
            .map(|(list, t)| {
                list.iter()
                    .map(|s| {
                        let o = &t.scenarios[s.payload];
                        ScenarioFile {
                            probability: s.probability,
                            rhs: o.rhs.clone(),
                            objective: o.objective.clone(),
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            name: None,
            initial_state: model.initial_state.clone(),
            floors: model.floors.clone(),
            rho_hint: model.rho_hint.clone(),
            templates,
            scenarios,
            config,
        }
    }

    /// Builds and validates the model; errors name the offending section.
    pub fn to_model(&self) -> Result<Model> {
        let at = |path: String| move |e: Error| match e {
            Error::MalformedProblem(m) => Error::MalformedProblem(format!("at {path}: {m}")),
            Error::ProbabilityMismatch { context, sum } => Error::MalformedProblem(format!(
                "at {path}: probabilities of {context} sum to {sum}"
            )),
            other => other,
        };
        if self.scenarios.len() != self.templates.len() {
            return Err(Error::MalformedProblem(format!(
                "at scenarios: {} stages for {} templates",
                self.scenarios.len(),
                self.templates.len()
            )));
        }
        let mut templates = Vec::with_capacity(self.templates.len());
        for (i, (tf, list)) in self.templates.iter().zip(&self.scenarios).enumerate() {
            let n = tf.variables.len();
            let mut p = MilpProblem::new(0);
            for v in &tf.variables {
                p.add_var(
                    v.cost,
                    v.lower.unwrap_or(f64::NEG_INFINITY),
                    v.upper.unwrap_or(f64::INFINITY),
                    v.integer,
                );
            }
            for (r, row) in tf.rows.iter().enumerate() {
                if let Some(&(j, _)) = row.terms.iter().find(|(j, _)| *j >= n) {
                    return Err(Error::MalformedProblem(format!(
                        "at templates[{i}].rows[{r}]: variable {j} out of range"
                    )));
                }
                p.add_row(&row.terms, row.sense, row.rhs);
            }
            let template = StageTemplate {
                problem: p,
                state_vars: tf.state_vars.clone(),
                copy_vars: tf.copy_vars.clone(),
                state_lower: tf.state_lower.clone(),
                state_upper: tf.state_upper.clone(),
                scenarios: list
                    .iter()
                    .map(|s| ScenarioOverride {
                        rhs: s.rhs.clone(),
                        objective: s.objective.clone(),
                    })
                    .collect(),
                lipschitz: tf.lipschitz,
            };
            template.validate().map_err(at(format!("templates[{i}]")))?;
            templates.push(template);
        }
        let scenarios = StagewiseScenarios::new(
            self.scenarios
                .iter()
                .map(|list| {
                    list.iter()
                        .enumerate()
                        .map(|(k, s)| Scenario {
                            payload: k,
                            probability: s.probability,
                        })
                        .collect()
                })
                .collect(),
        );
        for (i, list) in scenarios.stages.iter().enumerate() {
            check_distribution(list.iter().map(|s| s.probability), &format!("stage {}", i + 1))
                .map_err(at(format!("scenarios[{i}]")))?;
        }
        let model = Model {
            templates,
            scenarios,
            initial_state: self.initial_state.clone(),
            floors: self.floors.clone(),
            rho_hint: self.rho_hint.clone(),
        };
        model.validate().map_err(at("model".into()))?;
        if let Some(cfg) = &self.config {
            cfg.validate(&model).map_err(|e| match e {
                Error::InvalidConfig(m) => Error::MalformedProblem(format!("at config: {m}")),
                other => at("config".into())(other),
            })?;
        }
        Ok(model)
    }
}

/// Summary written as `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub lower_bound: f64,
    pub first_stage_state: Vec<f64>,
    pub iterations: usize,
    pub cuts_total: usize,
    pub seed: u64,
    pub config: SldpConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound_std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_bound: Option<f64>,
    pub max_rho: f64,
    pub monotone: bool,
    pub wall_ms: u64,
}

impl ResultSummary {
    pub fn new(result: &RunResult) -> Self {
        Self {
            lower_bound: result.lower_bound,
            first_stage_state: result.first_stage_state.clone(),
            iterations: result.iterations.len(),
            cuts_total: result.pools.iter().map(|p| p.len()).sum(),
            seed: result.config.seed,
            config: result.config.clone(),
            upper_bound_mean: result.policy.map(|p| p.mean),
            upper_bound_std_error: result.policy.map(|p| p.std_error),
            epsilon_bound: result.epsilon_bound,
            max_rho: result.max_rho,
            monotone: result.monotone,
            wall_ms: result.iterations.iter().map(|r| r.wall_ms).sum(),
        }
    }
}

/// `iter,lb,cuts_total,stage_solves` rows; timings go to `result.json` so
/// this file only depends on the inputs.
pub fn write_iterations_csv<W: Write>(out: W, result: &RunResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::NumericalFailure(format!("cannot write iterations: {e}"));
    w.write_record(["iter", "lb", "cuts_total", "stage_solves"]).map_err(io)?;
    for r in &result.iterations {
        w.write_record([
            r.iter.to_string(),
            r.lb.to_string(),
            r.cuts_total.to_string(),
            r.stage_solves.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::NumericalFailure(format!("cannot write iterations: {e}")))
}

/// Writes `iterations.csv` and `result.json` into `dir`.
pub fn write_run_artifacts(dir: &Path, result: &RunResult) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let csv = std::fs::File::create(dir.join("iterations.csv"))?;
    write_iterations_csv(csv, result).map_err(std::io::Error::other)?;
    let summary = serde_json::to_string_pretty(&ResultSummary::new(result))?;
    std::fs::write(dir.join("result.json"), summary + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gen_caroe_schultz, gen_control1d, CaroeSchultzSpec, ControlProblemSpec};

    #[test]
    fn model_round_trip() {
        let m = gen_caroe_schultz(&CaroeSchultzSpec {
            n: 2,
            discrete_first_stage: true,
        });
        let file = ProblemFile::from_model(&m, Some(SldpConfig::default()));
        let back = ProblemFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_model().unwrap(), m);
    }

    #[test]
    fn control_round_trip() {
        let spec = ControlProblemSpec {
            horizon: 3,
            ..ControlProblemSpec::default()
        };
        let m = gen_control1d(&spec).unwrap();
        let file = ProblemFile::from_model(&m, None);
        assert_eq!(ProblemFile::from_json(&file.to_json()).unwrap().to_model().unwrap(), m);
    }

    #[test]
    fn errors_carry_paths() {
        let m = gen_caroe_schultz(&CaroeSchultzSpec {
            n: 2,
            discrete_first_stage: true,
        });
        let mut file = ProblemFile::from_model(&m, None);
        file.scenarios[1][0].probability = 0.15;
        let err = file.to_model().unwrap_err().to_string();
        assert!(err.contains("scenarios[1]"), "{err}");

        let text = file.to_json().replace("\"sense\": \"<=\"", "\"sense\": \"<>\"");
        let err = ProblemFile::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("templates[0].rows[0].sense") || err.contains("templates[1].rows"), "{err}");

        let err = ProblemFile::from_json("{\"schema_version\": 2}").unwrap_err();
        assert!(matches!(err, Error::MalformedProblem(_)));
    }
}
