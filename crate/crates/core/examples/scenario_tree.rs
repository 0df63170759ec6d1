//! Stagewise-independent scenarios, the materialized tree they generate and
//! the lazy view used when the tree is too large to build.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sldp::tree::{build_stagewise_tree, lazy_node_view, Scenario, StagewiseScenarios};

fn main() -> sldp::Result<()> {
    let scenarios = StagewiseScenarios::new(vec![
        vec![Scenario { payload: 0, probability: 1.0 }],
        vec![
            Scenario { payload: 0, probability: 0.25 },
            Scenario { payload: 1, probability: 0.75 },
        ],
        vec![
            Scenario { payload: 0, probability: 0.5 },
            Scenario { payload: 1, probability: 0.3 },
            Scenario { payload: 2, probability: 0.2 },
        ],
    ]);
    scenarios.validate()?;
    println!("{} stages, {} nodes", scenarios.horizon(), scenarios.tree_size());

    let tree = build_stagewise_tree(&scenarios, 1_000)?;
    tree.validate()?;
    for t in 1..=tree.horizon {
        let nodes: Vec<String> = tree
            .stage_nodes(t)
            .map(|n| format!("{n}(q={:.3})", tree.nodes[n].probability))
            .collect();
        println!("stage {t}: {}", nodes.join(" "));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let path = tree.sample_path(&mut rng);
    println!("sampled node path {path:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let payloads = scenarios.sample_path(&mut rng);
    println!("same draw as payloads {payloads:?}");
    for step in lazy_node_view(&scenarios, &payloads) {
        println!(
            "  stage {} payload {} with {} successors",
            step.stage,
            step.payload,
            step.successors.len()
        );
    }

    let big = StagewiseScenarios::uniform(&[1, 10, 10, 10, 10, 10, 10, 10]);
    println!("control-sized tree: {} nodes, built on demand", big.tree_size());
    Ok(())
}
