//! The three cut families at one first-stage point of the N=2 Carøe–Schultz
//! instance, compared with the exact expected recourse value.
//!
//! The recourse value jumps at integer points, so no opening makes the
//! reverse-norm cut valid everywhere: it overshoots at `[1, 3]`. The
//! Lagrangian-based cuts stay below the exact value for any slope.

use sldp::bench::{gen_caroe_schultz, CaroeSchultzSpec, Oracle};
use sldp::cuts::{aggregate, reverse_norm_cut, strengthened_aug_benders_cut, strengthened_benders_cut, CutPool, PoolOwner};
use sldp::milp::SolverOptions;
use sldp::stage::{solve_stage, Site};

fn main() -> sldp::Result<()> {
    let model = gen_caroe_schultz(&CaroeSchultzSpec {
        n: 2,
        discrete_first_stage: true,
    });
    let opts = SolverOptions::default();
    let template = model.template(2);
    // Stage 2 is the last stage, so its own cost-to-go is zero.
    let pool = CutPool::new(PoolOwner::Stage(2), 0.0);
    let center = [2.0, 3.0];
    let rho = 4.0;

    let mut rn = Vec::new();
    let mut sb = Vec::new();
    let mut sab = Vec::new();
    for s in model.scenarios.stage(2) {
        let value = solve_stage(template, s.payload, &center, &pool, false, Site::default(), &opts)?.objective;
        rn.push((s.probability, value));
        let cut = strengthened_benders_cut(template, s.payload, &pool, &center, &opts)?;
        let aug = strengthened_aug_benders_cut(template, s.payload, &pool, &center, &cut.slope, rho, &opts)?;
        sb.push((s.probability, cut));
        sab.push((s.probability, aug));
    }
    let cuts = [
        ("reverse norm", reverse_norm_cut(&rn, &center, rho)),
        ("strengthened Benders", aggregate(&sb)?),
        ("augmented", aggregate(&sab)?),
    ];

    let mut oracle = Oracle::new(&model, opts, 1_000_000);
    print!("{:>8} {:>10}", "x", "exact");
    for (name, _) in &cuts {
        print!(" {name:>22}");
    }
    println!();
    for x in [[2.0, 3.0], [1.0, 3.0], [3.0, 3.0], [2.0, 5.0], [0.0, 0.0], [5.0, 5.0]] {
        print!("{:>8} {:>10.3}", format!("{x:?}"), oracle.expected_ctg(1, &x)?);
        for (_, cut) in &cuts {
            print!(" {:>22.3}", cut.evaluate(&x));
        }
        println!();
    }
    Ok(())
}
