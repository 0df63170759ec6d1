//! Property checks shared by the property tests and the acceptance suite.
//! Each returns a short summary on success and the first failure otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sldp::bench::Oracle;
use sldp::cuts::{CutFamily, CutPool, PoolOwner, RhoSchedule};
use sldp::engine::{run, Mode, PoolSharing, RhoRule, RunResult, SldpConfig};
use sldp::milp::{enumerate_milp, solve_milp, SolverOptions};
use sldp::model::Model;
use sldp::stage::{lagrangian_value, solve_stage, Site};
use sldp::tree::build_stagewise_tree;

use super::{random_milp, random_model};

pub type Check = Result<String, String>;

pub const ORACLE_CAP: usize = 5_000_000;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub const FAMILIES: [CutFamily; 3] = [
    CutFamily::ReverseNorm,
    CutFamily::StrengthenedBenders,
    CutFamily::StrengthenedAugBenders,
];

pub fn config(cuts: CutFamily, iterations: usize) -> SldpConfig {
    SldpConfig {
        cuts,
        max_iterations: iterations,
        rho: match cuts {
            CutFamily::ReverseNorm => RhoRule::Hint,
            _ => RhoRule::Schedule(RhoSchedule {
                rho0: 0.5,
                gamma: 2.0,
                period: 3,
                rho_max: 50.0,
            }),
        },
        ..SldpConfig::default()
    }
}

/// Two- and three-stage instances with one- and two-dimensional states.
pub fn instance(seed: u64) -> Model {
    let horizon = 2 + (seed % 2) as usize;
    let d = 1 + ((seed / 2) % 2) as usize;
    random_model(seed, horizon, d)
}

/// Stage whose expected cost-to-go each pool approximates.
fn pool_stages(model: &Model, result: &RunResult) -> Vec<usize> {
    match result.pools.first().map(|p| p.owner) {
        Some(PoolOwner::Node(_)) => {
            let tree = build_stagewise_tree(&model.scenarios, result.pools.len()).unwrap();
            tree.nodes.iter().map(|n| n.stage).collect()
        }
        _ => (1..=result.pools.len()).collect(),
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, model: &Model) -> Vec<f64> {
    let t = model.template(1);
    t.state_lower
        .iter()
        .zip(&t.state_upper)
        .map(|(&l, &u)| rng.gen_range(l..=u))
        .collect()
}

pub fn monotone(r: &RunResult) -> Result<(), String> {
    ensure!(r.monotone, "run flagged a lower-bound decrease");
    for w in r.lower_bounds().windows(2) {
        ensure!(w[1] >= w[0] - 1e-9, "lower bound dropped: {w:?}");
    }
    Ok(())
}

pub fn cut_validity(instances: u64, states: usize, iterations: usize) -> Check {
    let opts = SolverOptions::default();
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let model = instance(seed);
        let mut runs = Vec::new();
        for c in FAMILIES {
            let r = run(&model, &config(c, iterations)).map_err(|e| e.to_string())?;
            monotone(&r)?;
            runs.push(r);
        }
        let mut oracle = Oracle::new(&model, opts, ORACLE_CAP);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        for _ in 0..states {
            let x = random_state(&mut rng, &model);
            for r in &runs {
                let stages = pool_stages(&model, r);
                for (pool, &t) in r.pools.iter().zip(&stages) {
                    if t >= model.horizon() {
                        continue;
                    }
                    let truth = oracle.expected_ctg(t, &x).map_err(|e| e.to_string())?;
                    let excess = pool.value(&x) - truth;
                    checked += 1;
                    worst = worst.max(excess);
                    if excess > 1e-6 {
                        violations += 1;
                    }
                }
            }
        }
    }
    ensure!(
        violations == 0,
        "{violations} of {checked} cut checks exceed the oracle (worst {worst:.3e})"
    );
    Ok(format!("{instances} instances, {checked} checks, 0 violations"))
}

pub fn weak_duality(instances: u64) -> Check {
    let opts = SolverOptions::default();
    let mut checked = 0usize;
    for seed in 0..instances {
        let model = random_model(seed, 2, 1 + (seed % 2) as usize);
        let template = model.template(2);
        let pool = CutPool::new(PoolOwner::Stage(2), 0.0);
        let mut oracle = Oracle::new(&model, opts, ORACLE_CAP);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for payload in 0..template.scenarios.len() {
            for _ in 0..5 {
                let c = random_state(&mut rng, &model);
                let slope: Vec<f64> = c.iter().map(|_| rng.gen_range(-5.0..5.0)).collect();
                let truth = oracle.ctg(2, payload, &c).map_err(|e| e.to_string())?;
                let mut last = f64::NEG_INFINITY;
                for rho in [0.0, 0.5, 1.0, 2.0, 5.0, 20.0] {
                    let v = lagrangian_value(template, payload, &c, &pool, &slope, rho, Site::default(), &opts)
                        .map_err(|e| e.to_string())?;
                    ensure!(v <= truth + 1e-6, "seed {seed}: dual value {v} above {truth}");
                    ensure!(v >= last - 1e-6, "seed {seed}: dual value decreased in rho");
                    last = v;
                    let x = random_state(&mut rng, &model);
                    let dist: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).abs()).sum();
                    let lin: f64 = slope.iter().zip(x.iter().zip(&c)).map(|(l, (a, b))| l * (a - b)).sum();
                    let qx = oracle.ctg(2, payload, &x).map_err(|e| e.to_string())?;
                    ensure!(v + lin - rho * dist <= qx + 1e-6, "seed {seed}: cut above value at {x:?}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (lambda, rho) pairs"))
}

pub fn gadget_exactness(seeds: &[u64]) -> Check {
    let opts = SolverOptions::default();
    let mut checked = 0usize;
    for &seed in seeds {
        let model = instance(seed);
        let mut cfg = config(CutFamily::StrengthenedAugBenders, 8);
        cfg.pool_sharing = Some(PoolSharing::PerStage);
        let r = run(&model, &cfg).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 1..model.horizon() {
            let pool = &r.pools[t - 1];
            let template = model.template(t);
            for _ in 0..10 {
                let incoming = if t == 1 { vec![] } else { random_state(&mut rng, &model) };
                for payload in 0..template.scenarios.len() {
                    let sol = solve_stage(template, payload, &incoming, pool, false, Site::default(), &opts)
                        .map_err(|e| e.to_string())?;
                    for (cut, &norm) in pool.cuts.iter().filter(|c| c.rho > 0.0).zip(&sol.norm_terms) {
                        let dist: f64 = sol.state.iter().zip(&cut.center).map(|(a, b)| (a - b).abs()).sum();
                        ensure!((norm - dist).abs() <= 1e-6, "gadget {norm} vs distance {dist}");
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} encodings exact"))
}

pub fn stabilization_bound(instances: u64) -> Check {
    let opts = SolverOptions::default();
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..instances {
        let model = random_model(100 + seed, 3, 1);
        let lipschitz = model.rho_hint.as_ref().unwrap().iter().cloned().fold(0.0, f64::max);
        let cfg = SldpConfig {
            mode: Mode::Sampled,
            delta: 0.25,
            lipschitz_bound: Some(lipschitz),
            seed,
            ..config(CutFamily::ReverseNorm, 150)
        };
        let r = run(&model, &cfg).map_err(|e| e.to_string())?;
        monotone(&r)?;
        let eps = r.epsilon_bound.ok_or("no bound reported")?;
        let truth = Oracle::new(&model, opts, ORACLE_CAP)
            .root_value()
            .map_err(|e| e.to_string())?;
        ensure!(r.lower_bound <= truth + 1e-6, "seed {seed}: bound above optimum");
        let gap = truth - r.lower_bound;
        ensure!(gap <= eps + 1e-6, "seed {seed}: gap {gap} above {eps}");
        worst = worst.max(gap - eps);
    }
    Ok(format!("{instances} instances, largest gap minus bound {worst:.3}"))
}

pub fn kernel_vs_enumeration(instances: u64) -> Check {
    let opts = SolverOptions::default();
    for seed in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_milp(seed, rng.gen_range(1..=8), rng.gen_range(0..=2));
        let bb = solve_milp(&p, &opts).map_err(|e| e.to_string())?;
        let en = enumerate_milp(&p, &opts).map_err(|e| e.to_string())?;
        ensure!(bb.status == en.status, "seed {seed}: status {:?} vs {:?}", bb.status, en.status);
        ensure!(
            (bb.objective - en.objective).abs() <= 1e-6,
            "seed {seed}: {} vs {}",
            bb.objective,
            en.objective
        );
    }
    Ok(format!("{instances} instances exact"))
}
