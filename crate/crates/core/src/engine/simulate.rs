use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cuts::{CutPool, PoolOwner};
use crate::error::{Error, Result};
use crate::milp::SolverOptions;
use crate::model::Model;

use super::config::PoolSharing;
use super::walk::Walker;

/// Monte Carlo estimate of the expected cost of the policy induced by a set
/// of cut pools.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Stream of the policy-simulation generator, distinct from training.
const SIMULATION_STREAM: u64 = 1;

pub(crate) fn simulate_with(
    walker: &Walker<'_>,
    pools: &[CutPool],
    n_samples: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<PolicyEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("policy simulation needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SIMULATION_STREAM);
    let mut costs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut incoming = walker.model.initial_state.clone();
        let mut cost = 0.0;
        for n in walker.sample_path(&mut rng) {
            let sol = walker.solve(n, &incoming, &pools[walker.slot(n)], false, opts)?;
            cost += sol.immediate_cost;
            incoming = sol.state;
        }
        costs.push(cost);
    }
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let std_error = if costs.len() > 1 {
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(PolicyEstimate {
        mean,
        std_error,
        samples: costs.len(),
    })
}

/// Simulates `n_samples` forward passes with the given pools, summing the
/// immediate stage costs. Pools owned by nodes require a materializable tree.
pub fn simulate_policy(
    model: &Model,
    pools: &[CutPool],
    n_samples: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<PolicyEstimate> {
    model.validate()?;
    let sharing = match pools.first().map(|p| p.owner) {
        Some(PoolOwner::Node(_)) => PoolSharing::PerNode,
        _ => PoolSharing::PerStage,
    };
    let cap = match sharing {
        PoolSharing::PerNode => pools.len(),
        PoolSharing::PerStage => 0,
    };
    let walker = Walker::new(model, cap, Some(sharing))?;
    let expected = match sharing {
        PoolSharing::PerNode => walker.tree.as_ref().map_or(0, |t| t.len()),
        PoolSharing::PerStage => model.horizon(),
    };
    if pools.len() != expected {
        return Err(Error::InvalidConfig(format!(
            "expected {expected} pools, found {}",
            pools.len()
        )));
    }
    simulate_with(&walker, pools, n_samples, seed, opts)
}
