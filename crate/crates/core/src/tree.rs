//! Scenario trees, stagewise-independent scenario sets and path sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum of transition probabilities out of a node.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Largest tree [`build_stagewise_tree`] will materialize by default.
pub const DEFAULT_NODE_CAP: usize = 100_000;

/// One realization of a stage: an index into the stage template's scenario
/// overrides together with its probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub payload: usize,
    pub probability: f64,
}

/// Independent scenario lists for stages `1..=T` (index 0 is stage 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StagewiseScenarios {
    pub stages: Vec<Vec<Scenario>>,
}

impl StagewiseScenarios {
    pub fn new(stages: Vec<Vec<Scenario>>) -> Self {
        Self { stages }
    }

    /// Equiprobable scenarios with payloads `0..counts[t]`.
    pub fn uniform(counts: &[usize]) -> Self {
        Self::new(
            counts
                .iter()
                .map(|&c| {
                    (0..c)
                        .map(|payload| Scenario {
                            payload,
                            probability: 1.0 / c as f64,
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    /// Stage numbers are 1-based.
    pub fn stage(&self, t: usize) -> &[Scenario] {
        &self.stages[t - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::MalformedProblem("no stages".into()));
        }
        if self.stages[0].len() != 1 {
            return Err(Error::MalformedProblem(format!(
                "stage 1 must have exactly one scenario, found {}",
                self.stages[0].len()
            )));
        }
        for (i, list) in self.stages.iter().enumerate() {
            check_distribution(list.iter().map(|s| s.probability), &format!("stage {}", i + 1))?;
        }
        Ok(())
    }

    /// Number of nodes in the full product tree.
    pub fn tree_size(&self) -> f64 {
        let mut width = 1.0;
        let mut total = 0.0;
        for list in &self.stages {
            width *= list.len() as f64;
            total += width;
        }
        total
    }

    /// Draws one scenario index per stage, root first.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.stages
            .iter()
            .map(|list| pick(list.iter().map(|s| s.probability), rng))
            .collect()
    }
}

pub(crate) fn check_distribution(probs: impl Iterator<Item = f64>, context: &str) -> Result<()> {
    let mut sum = 0.0;
    let mut count = 0;
    for q in probs {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::ProbabilityMismatch {
                context: format!("{context} (nonpositive entry {q})"),
                sum: f64::NAN,
            });
        }
        sum += q;
        count += 1;
    }
    if count == 0 || (sum - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::ProbabilityMismatch {
            context: context.to_string(),
            sum,
        });
    }
    Ok(())
}

/// Index drawn from the cumulative distribution of `probs` with a single
/// uniform draw.
fn pick<R: Rng + ?Sized>(probs: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, q) in probs.enumerate() {
        acc += q;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub ancestor: Option<usize>,
    /// 1-based stage.
    pub stage: usize,
    pub children: Vec<usize>,
    /// Transition probability from the ancestor (1 at the root).
    pub probability: f64,
    pub payload: usize,
}

/// Scenario tree with node 0 as root. Nodes of one stage are contiguous and
/// ordered by ancestor, then by scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTree {
    pub nodes: Vec<TreeNode>,
    pub horizon: usize,
}

impl ScenarioTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids of stage `t`.
    pub fn stage_nodes(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&n| self.nodes[n].stage == t)
    }

    pub fn validate(&self) -> Result<()> {
        let root = self.nodes.first().ok_or_else(|| Error::MalformedProblem("empty tree".into()))?;
        if root.ancestor.is_some() || root.stage != 1 {
            return Err(Error::MalformedProblem("node 0 is not a stage-1 root".into()));
        }
        let mut horizon = 1;
        for (n, node) in self.nodes.iter().enumerate() {
            horizon = horizon.max(node.stage);
            if n > 0 {
                match node.ancestor {
                    Some(a) if a < n && self.nodes[a].children.contains(&n) => {}
                    _ => {
                        return Err(Error::MalformedProblem(format!(
                            "node {n} has an inconsistent ancestor"
                        )))
                    }
                }
            }
            if node.children.is_empty() {
                continue;
            }
            for &m in &node.children {
                if m >= self.nodes.len() || m <= n || self.nodes[m].stage != node.stage + 1 {
                    return Err(Error::MalformedProblem(format!(
                        "node {n} has an invalid successor {m}"
                    )));
                }
            }
            check_distribution(
                node.children.iter().map(|&m| self.nodes[m].probability),
                &format!("successors of node {n}"),
            )?;
        }
        if horizon != self.horizon {
            return Err(Error::MalformedProblem(format!(
                "horizon {} does not match deepest stage {horizon}",
                self.horizon
            )));
        }
        Ok(())
    }

    /// Node ids from the root to a leaf, each step drawn from the transition
    /// probabilities. Uses the same draws as [`StagewiseScenarios::sample_path`]
    /// on a tree built from those scenarios.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut n = self.root();
        let mut path = Vec::with_capacity(self.horizon);
        // The root's own draw keeps streams aligned with the stagewise sampler.
        let _: f64 = rng.gen();
        path.push(n);
        while !self.nodes[n].children.is_empty() {
            let kids = &self.nodes[n].children;
            n = kids[pick(kids.iter().map(|&m| self.nodes[m].probability), rng)];
            path.push(n);
        }
        path
    }
}

/// Materializes the full product tree of a stagewise-independent input.
pub fn build_stagewise_tree(scenarios: &StagewiseScenarios, node_cap: usize) -> Result<ScenarioTree> {
    scenarios.validate()?;
    let size = scenarios.tree_size();
    if size > node_cap as f64 {
        return Err(Error::NodeCapExceeded {
            nodes: size,
            cap: node_cap,
        });
    }
    let root = scenarios.stages[0][0];
    let mut nodes = vec![TreeNode {
        ancestor: None,
        stage: 1,
        children: Vec::new(),
        probability: 1.0,
        payload: root.payload,
    }];
    let mut frontier = vec![0usize];
    for t in 2..=scenarios.horizon() {
        let mut next = Vec::with_capacity(frontier.len() * scenarios.stage(t).len());
        for &a in &frontier {
            for s in scenarios.stage(t) {
                let id = nodes.len();
                nodes.push(TreeNode {
                    ancestor: Some(a),
                    stage: t,
                    children: Vec::new(),
                    probability: s.probability,
                    payload: s.payload,
                });
                nodes[a].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(ScenarioTree {
        nodes,
        horizon: scenarios.horizon(),
    })
}

/// One step of a lazily walked stagewise path.
#[derive(Debug, Clone, PartialEq)]
pub struct LazyStep {
    pub stage: usize,
    pub payload: usize,
    pub successors: Vec<Scenario>,
}

/// Payloads along `path` (one scenario index per stage) plus the successor
/// scenarios at every step, without building the tree.
pub fn lazy_node_view(scenarios: &StagewiseScenarios, path: &[usize]) -> Vec<LazyStep> {
    path.iter()
        .enumerate()
        .map(|(i, &s)| LazyStep {
            stage: i + 1,
            payload: scenarios.stages[i][s].payload,
            successors: scenarios.stages.get(i + 1).cloned().unwrap_or_default(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_stage_four_scenarios() {
        let s = StagewiseScenarios::uniform(&[1, 4]);
        let tree = build_stagewise_tree(&s, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(tree.len(), 5);
        assert_eq!(tree.nodes[0].children, vec![1, 2, 3, 4]);
        assert!(tree.nodes[1..].iter().all(|n| n.probability == 0.25));
        tree.validate().unwrap();
    }

    #[test]
    fn nine_leaf_tree_has_ten_nodes() {
        let tree = build_stagewise_tree(&StagewiseScenarios::uniform(&[1, 9]), DEFAULT_NODE_CAP).unwrap();
        assert_eq!(tree.len(), 10);
    }

    #[test]
    fn control_sized_tree_is_refused() {
        let s = StagewiseScenarios::uniform(&[1, 10, 10, 10, 10, 10, 10, 10]);
        assert_eq!(s.tree_size(), 11_111_111.0);
        assert!(matches!(
            build_stagewise_tree(&s, DEFAULT_NODE_CAP),
            Err(Error::NodeCapExceeded { .. })
        ));
    }

    #[test]
    fn rejects_bad_probabilities() {
        let mut s = StagewiseScenarios::uniform(&[1, 3]);
        s.stages[1][0].probability = 0.2;
        assert!(matches!(
            build_stagewise_tree(&s, DEFAULT_NODE_CAP),
            Err(Error::ProbabilityMismatch { .. })
        ));
        let s = StagewiseScenarios::uniform(&[2, 3]);
        assert!(s.validate().is_err());

        let mut tree = build_stagewise_tree(&StagewiseScenarios::uniform(&[1, 2, 2]), 100).unwrap();
        tree.validate().unwrap();
        tree.nodes[3].probability = 0.4;
        assert!(tree.validate().is_err());
        tree.nodes[3].probability = 0.0;
        tree.nodes[4].probability = 1.0;
        assert!(tree.validate().is_err());
    }

    #[test]
    fn single_branch_tree_path() {
        let tree = build_stagewise_tree(&StagewiseScenarios::uniform(&[1, 1, 1]), 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(tree.sample_path(&mut rng), vec![0, 1, 2]);
    }

    #[test]
    fn leaf_frequencies() {
        let tree = build_stagewise_tree(&StagewiseScenarios::uniform(&[1, 4]), 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 4];
        let draws = 100_000;
        for _ in 0..draws {
            counts[tree.sample_path(&mut rng)[1] - 1] += 1;
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.25).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn sampling_is_reproducible_and_matches_stagewise_draws() {
        let s = StagewiseScenarios::uniform(&[1, 3, 2, 4]);
        let tree = build_stagewise_tree(&s, 1000).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let mut c = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = tree.sample_path(&mut a);
            assert_eq!(p, tree.sample_path(&mut b));
            let lazy = s.sample_path(&mut c);
            let payloads: Vec<usize> = p.iter().map(|&n| tree.nodes[n].payload).collect();
            assert_eq!(payloads, lazy);
        }
    }

    #[test]
    fn lazy_view_counts_and_leaf() {
        let s = StagewiseScenarios::uniform(&[1, 10, 10, 10, 10, 10, 10, 10]);
        let view = lazy_node_view(&s, &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(view.len(), 8);
        assert_eq!(view.iter().map(|v| v.successors.len()).sum::<usize>(), 70);
        assert!(view[7].successors.is_empty());
    }

    #[test]
    fn lazy_view_matches_tree_on_two_stages() {
        let s = StagewiseScenarios::uniform(&[1, 3]);
        let tree = build_stagewise_tree(&s, 10).unwrap();
        for leaf in 1..4 {
            let view = lazy_node_view(&s, &[0, leaf - 1]);
            assert_eq!(view[1].payload, tree.nodes[leaf].payload);
            let kids: Vec<(usize, f64)> = tree.nodes[0]
                .children
                .iter()
                .map(|&m| (tree.nodes[m].payload, tree.nodes[m].probability))
                .collect();
            let lazy: Vec<(usize, f64)> = view[0].successors.iter().map(|s| (s.payload, s.probability)).collect();
            assert_eq!(kids, lazy);
        }
    }
}
