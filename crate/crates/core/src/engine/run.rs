use std::time::Instant;

use log::{debug, info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cuts::{aggregate, Cut, CutFamily, CutPool, PoolOwner, Provenance};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::stage::{lagrangian_value, Site};

use super::config::{Mode, SldpConfig};
use super::simulate::{simulate_with, PolicyEstimate};
use super::walk::{NodeRef, Walker};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration number.
    pub iter: usize,
    /// First-stage objective of this iteration's forward pass.
    pub lb: f64,
    pub cuts_added: usize,
    pub cuts_total: usize,
    pub stage_solves: usize,
    pub wall_ms: u64,
    /// Forward states: the sampled path in sampled runs, the first-stage
    /// state in full runs.
    pub trajectory: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: SldpConfig,
    pub iterations: Vec<IterationRecord>,
    /// First-stage objective with the final pools.
    pub lower_bound: f64,
    /// First-stage decision with the final pools.
    pub first_stage_state: Vec<f64>,
    pub pools: Vec<CutPool>,
    pub policy: Option<PolicyEstimate>,
    /// `(L + rho) * delta * (T - 1)` for sampled runs with a positive radius
    /// and a known Lipschitz bound.
    pub epsilon_bound: Option<f64>,
    /// Largest opening among the added cuts.
    pub max_rho: f64,
    /// False when some lower bound dropped by more than 1e-9.
    pub monotone: bool,
}

impl RunResult {
    pub fn lower_bounds(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.lb).collect()
    }
}

/// Snaps `candidate` to the nearest stored state when it is closer than
/// `delta` in the L1 norm (lowest index on ties); otherwise stores and
/// returns it.
pub fn stabilize_state(candidate: &[f64], history: &mut Vec<Vec<f64>>, delta: f64) -> Vec<f64> {
    let mut best: Option<(usize, f64)> = None;
    for (i, h) in history.iter().enumerate() {
        let d: f64 = h.iter().zip(candidate).map(|(a, b)| (a - b).abs()).sum();
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    match best {
        Some((i, d)) if d < delta => history[i].clone(),
        _ => {
            history.push(candidate.to_vec());
            candidate.to_vec()
        }
    }
}

struct Engine<'a> {
    walker: Walker<'a>,
    cfg: &'a SldpConfig,
    pools: Vec<CutPool>,
    histories: Vec<Vec<Vec<f64>>>,
    solves: usize,
    max_rho: f64,
}

impl<'a> Engine<'a> {
    fn new(model: &'a Model, cfg: &'a SldpConfig) -> Result<Self> {
        model.validate()?;
        cfg.validate(model)?;
        let walker = Walker::new(model, cfg.node_cap, cfg.pool_sharing)?;
        let pools = walker.new_pools(|t| cfg.floor(model, t));
        let histories = vec![Vec::new(); pools.len()];
        Ok(Self {
            walker,
            cfg,
            pools,
            histories,
            solves: 0,
            max_rho: 0.0,
        })
    }

    fn model(&self) -> &'a Model {
        self.walker.model
    }

    fn solve(&mut self, n: NodeRef, incoming: &[f64], want_duals: bool) -> Result<crate::stage::StageSolution> {
        self.solves += 1;
        let pool = &self.pools[self.walker.slot(n)];
        self.walker.solve(n, incoming, pool, want_duals, &self.cfg.solver)
    }

    /// Cut on the successor value function of `m` at `center`.
    fn successor_cut(&mut self, m: NodeRef, center: &[f64], rho: f64) -> Result<Cut> {
        let family = self.cfg.cuts;
        let want_duals = family != CutFamily::ReverseNorm;
        let sol = self.solve(m, center, want_duals)?;
        let d = center.len();
        if family == CutFamily::ReverseNorm {
            return Ok(Cut {
                center: center.to_vec(),
                intercept: sol.objective,
                slope: vec![0.0; d],
                rho,
                provenance: None,
            });
        }
        let slope = sol.copy_duals.unwrap_or_else(|| vec![0.0; d]);
        let rho = if family == CutFamily::StrengthenedBenders { 0.0 } else { rho };
        self.solves += 1;
        let site = Site {
            node: m.id,
            stage: m.stage,
        };
        let pool = &self.pools[self.walker.slot(m)];
        let intercept = lagrangian_value(
            self.walker.template(m),
            m.payload,
            center,
            pool,
            &slope,
            rho,
            site,
            &self.cfg.solver,
        )?;
        Ok(Cut {
            center: center.to_vec(),
            intercept,
            slope,
            rho,
            provenance: None,
        })
    }

    /// Adds one aggregated cut to the pool of `n`; returns whether it was kept.
    fn backward_step(&mut self, n: NodeRef, center: &[f64], k: usize) -> Result<bool> {
        let rho = self.cfg.rho(self.model(), n.stage, k);
        let mut cuts = Vec::new();
        for (m, q) in self.walker.children(n) {
            cuts.push((q, self.successor_cut(m, center, rho)?));
        }
        if cuts.is_empty() {
            return Ok(false);
        }
        let slot = self.walker.slot(n);
        let owner = match self.pools[slot].owner {
            PoolOwner::Node(i) | PoolOwner::Stage(i) => i,
        };
        let cut = aggregate(&cuts)?.with_provenance(Provenance {
            family: self.cfg.cuts,
            owner,
            iteration: k + 1,
        });
        self.max_rho = self.max_rho.max(cut.rho);
        let pool = &mut self.pools[slot];
        Ok(if self.cfg.skip_dominated {
            pool.push_unless_dominated(cut)
        } else {
            pool.push(cut);
            true
        })
    }

    fn total_cuts(&self) -> usize {
        self.pools.iter().map(|p| p.len()).sum()
    }

    /// Forward pass over every node; returns the root objective, root
    /// state and all node states.
    fn forward_full(&mut self) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
        let nodes = self.walker.all_nodes().ok_or(Error::NodeCapExceeded {
            nodes: self.model().scenarios.tree_size(),
            cap: self.cfg.node_cap,
        })?;
        let mut states: Vec<Vec<f64>> = vec![Vec::new(); nodes.len()];
        let mut root = (0.0, Vec::new());
        for n in nodes {
            let incoming = match self.walker.ancestor(n) {
                Some(a) => states[a].clone(),
                None => self.model().initial_state.clone(),
            };
            let sol = self.solve(n, &incoming, false)?;
            if n.id == 0 {
                root = (sol.objective, sol.state.clone());
            }
            states[n.id] = sol.state;
        }
        Ok((root.0, root.1, states))
    }

    fn iterate_full(&mut self, k: usize) -> Result<(f64, usize, Vec<Vec<f64>>)> {
        let (lb, root_state, states) = self.forward_full()?;
        let nodes = self.walker.all_nodes().expect("materialized");
        let mut added = 0;
        for t in (1..self.model().horizon()).rev() {
            for &n in nodes.iter().filter(|n| n.stage == t) {
                if self.backward_step(n, &states[n.id], k)? {
                    added += 1;
                }
            }
        }
        Ok((lb, added, vec![root_state]))
    }

    fn iterate_sampled(&mut self, k: usize, rng: &mut ChaCha8Rng) -> Result<(f64, usize, Vec<Vec<f64>>)> {
        let path = self.walker.sample_path(rng);
        let horizon = self.model().horizon();
        let mut incoming = self.model().initial_state.clone();
        let mut states = Vec::with_capacity(path.len());
        let mut lb = 0.0;
        for &n in &path {
            let sol = self.solve(n, &incoming, false)?;
            if n.stage == 1 {
                lb = sol.objective;
            }
            let x = if n.stage < horizon {
                let slot = self.walker.slot(n);
                stabilize_state(&sol.state, &mut self.histories[slot], self.cfg.delta)
            } else {
                sol.state
            };
            states.push(x.clone());
            incoming = x;
        }
        let mut added = 0;
        for i in (0..path.len().saturating_sub(1)).rev() {
            if self.backward_step(path[i], &states[i], k)? {
                added += 1;
            }
        }
        Ok((lb, added, states))
    }

    fn run(mut self, mode: Mode) -> Result<RunResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut iterations: Vec<IterationRecord> = Vec::new();
        let mut monotone = true;
        for k in 0..self.cfg.max_iterations {
            let start = Instant::now();
            let solves_before = self.solves;
            let (lb, cuts_added, trajectory) = match mode {
                Mode::Full => self.iterate_full(k)?,
                Mode::Sampled => self.iterate_sampled(k, &mut rng)?,
            };
            if let Some(prev) = iterations.last() {
                if lb < prev.lb - 1e-9 {
                    warn!("lower bound decreased from {} to {lb} at iteration {}", prev.lb, k + 1);
                    monotone = false;
                }
            }
            let record = IterationRecord {
                iter: k + 1,
                lb,
                cuts_added,
                cuts_total: self.total_cuts(),
                stage_solves: self.solves - solves_before,
                wall_ms: if self.cfg.timing {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                },
                trajectory,
            };
            info!(
                "iter {:>4}  lb {:>14.6}  cuts {:>6}  solves {:>6}",
                record.iter, record.lb, record.cuts_total, record.stage_solves
            );
            iterations.push(record);
            let w = self.cfg.stop_window;
            if self.cfg.stop_tolerance > 0.0 && w > 0 && iterations.len() > w {
                let now = iterations[iterations.len() - 1].lb;
                let then = iterations[iterations.len() - 1 - w].lb;
                if now - then < self.cfg.stop_tolerance * now.abs().max(1.0) {
                    debug!("stopping: lower bound improved by {} over {w} iterations", now - then);
                    break;
                }
            }
        }
        let root = self.walker.root();
        let init = self.model().initial_state.clone();
        let final_root = self.solve(root, &init, false)?;
        if let Some(prev) = iterations.last() {
            if final_root.objective < prev.lb - 1e-9 {
                monotone = false;
            }
        }
        let horizon = self.model().horizon();
        let epsilon_bound = match (mode, self.cfg.lipschitz_bound) {
            (Mode::Sampled, Some(l)) if self.cfg.delta > 0.0 => {
                Some((l + self.max_rho) * self.cfg.delta * (horizon as f64 - 1.0))
            }
            _ => None,
        };
        let policy = if self.cfg.sim_samples > 0 {
            Some(simulate_with(
                &self.walker,
                &self.pools,
                self.cfg.sim_samples,
                self.cfg.seed,
                &self.cfg.solver,
            )?)
        } else {
            None
        };
        Ok(RunResult {
            config: self.cfg.clone(),
            iterations,
            lower_bound: final_root.objective,
            first_stage_state: final_root.state,
            pools: self.pools,
            policy,
            epsilon_bound,
            max_rho: self.max_rho,
            monotone,
        })
    }
}

/// Runs the mode selected in `cfg`.
pub fn run(model: &Model, cfg: &SldpConfig) -> Result<RunResult> {
    Engine::new(model, cfg)?.run(cfg.mode)
}

/// Full-tree passes: every node is solved forward and receives one
/// aggregated cut backward in each iteration.
pub fn run_full(model: &Model, cfg: &SldpConfig) -> Result<RunResult> {
    let engine = Engine::new(model, cfg)?;
    if engine.walker.tree.is_none() {
        return Err(Error::NodeCapExceeded {
            nodes: model.scenarios.tree_size(),
            cap: cfg.node_cap,
        });
    }
    engine.run(Mode::Full)
}

/// One sampled, stabilized path per iteration; cuts only along the path.
pub fn run_sampled(model: &Model, cfg: &SldpConfig) -> Result<RunResult> {
    Engine::new(model, cfg)?.run(Mode::Sampled)
}
