use rand::Rng;

use crate::cuts::{CutPool, PoolOwner};
use crate::error::{Error, Result};
use crate::milp::SolverOptions;
use crate::model::Model;
use crate::stage::{solve_stage, Site, StageSolution, StageTemplate};
use crate::tree::{build_stagewise_tree, ScenarioTree};

use super::config::PoolSharing;

/// A node of the materialized tree, or a `(stage, scenario)` pair when the
/// tree is walked lazily.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NodeRef {
    pub id: usize,
    pub stage: usize,
    pub payload: usize,
}

/// Tree access and pool ownership shared by training and simulation.
pub(crate) struct Walker<'a> {
    pub model: &'a Model,
    pub tree: Option<ScenarioTree>,
    pub sharing: PoolSharing,
}

impl<'a> Walker<'a> {
    /// Materializes the tree if it fits under `node_cap`.
    pub fn new(model: &'a Model, node_cap: usize, sharing: Option<PoolSharing>) -> Result<Self> {
        let tree = if model.scenarios.tree_size() <= node_cap as f64 {
            Some(build_stagewise_tree(&model.scenarios, node_cap)?)
        } else {
            None
        };
        let sharing = match (sharing, &tree) {
            (Some(PoolSharing::PerNode), None) => {
                return Err(Error::NodeCapExceeded {
                    nodes: model.scenarios.tree_size(),
                    cap: node_cap,
                })
            }
            (Some(s), _) => s,
            (None, Some(_)) => PoolSharing::PerNode,
            (None, None) => PoolSharing::PerStage,
        };
        Ok(Self { model, tree, sharing })
    }

    pub fn root(&self) -> NodeRef {
        NodeRef {
            id: 0,
            stage: 1,
            payload: self.model.scenarios.stage(1)[0].payload,
        }
    }

    pub fn template(&self, n: NodeRef) -> &'a StageTemplate {
        self.model.template(n.stage)
    }

    pub fn children(&self, n: NodeRef) -> Vec<(NodeRef, f64)> {
        if n.stage >= self.model.horizon() {
            return Vec::new();
        }
        match &self.tree {
            Some(tree) => tree.nodes[n.id]
                .children
                .iter()
                .map(|&m| {
                    let node = &tree.nodes[m];
                    (
                        NodeRef {
                            id: m,
                            stage: node.stage,
                            payload: node.payload,
                        },
                        node.probability,
                    )
                })
                .collect(),
            None => self
                .model
                .scenarios
                .stage(n.stage + 1)
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    (
                        NodeRef {
                            id: i,
                            stage: n.stage + 1,
                            payload: s.payload,
                        },
                        s.probability,
                    )
                })
                .collect(),
        }
    }

    /// Index of the pool (and forward history) attached to `n`.
    pub fn slot(&self, n: NodeRef) -> usize {
        match self.sharing {
            PoolSharing::PerNode => n.id,
            PoolSharing::PerStage => n.stage - 1,
        }
    }

    pub fn new_pools(&self, floor: impl Fn(usize) -> f64) -> Vec<CutPool> {
        match (self.sharing, &self.tree) {
            (PoolSharing::PerNode, Some(tree)) => tree
                .nodes
                .iter()
                .enumerate()
                .map(|(id, node)| CutPool::new(PoolOwner::Node(id), floor(node.stage)))
                .collect(),
            _ => (1..=self.model.horizon())
                .map(|t| CutPool::new(PoolOwner::Stage(t), floor(t)))
                .collect(),
        }
    }

    /// All nodes of the materialized tree in stage order.
    pub fn all_nodes(&self) -> Option<Vec<NodeRef>> {
        self.tree.as_ref().map(|tree| {
            tree.nodes
                .iter()
                .enumerate()
                .map(|(id, node)| NodeRef {
                    id,
                    stage: node.stage,
                    payload: node.payload,
                })
                .collect()
        })
    }

    pub fn ancestor(&self, n: NodeRef) -> Option<usize> {
        self.tree.as_ref().and_then(|t| t.nodes[n.id].ancestor)
    }

    /// One root-to-leaf path drawn from `rng`.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<NodeRef> {
        match &self.tree {
            Some(tree) => tree
                .sample_path(rng)
                .into_iter()
                .map(|id| NodeRef {
                    id,
                    stage: tree.nodes[id].stage,
                    payload: tree.nodes[id].payload,
                })
                .collect(),
            None => self
                .model
                .scenarios
                .sample_path(rng)
                .into_iter()
                .enumerate()
                .map(|(i, s)| NodeRef {
                    id: s,
                    stage: i + 1,
                    payload: self.model.scenarios.stages[i][s].payload,
                })
                .collect(),
        }
    }

    pub fn solve(
        &self,
        n: NodeRef,
        incoming: &[f64],
        pool: &CutPool,
        want_duals: bool,
        opts: &SolverOptions,
    ) -> Result<StageSolution> {
        let site = Site {
            node: n.id,
            stage: n.stage,
        };
        solve_stage(self.template(n), n.payload, incoming, pool, want_duals, site, opts)
    }
}
