//! Strengthened Benders versus strengthened augmented Benders cuts on the
//! two-stage Carøe–Schultz instances, against the exact optimum.
//!
//! `cargo run --release --example caroe_schultz -- [iterations] [--continuous]`

use sldp::bench::{run_caroe_row, CaroeSchultzSpec};

fn main() -> sldp::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let iterations = args.iter().find_map(|a| a.parse().ok()).unwrap_or(200);
    let discrete = !args.iter().any(|a| a == "--continuous");
    println!(
        "{} first stage, {iterations} iterations",
        if discrete { "integer" } else { "continuous" }
    );
    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>12} {:>8} {:>8}",
        "N", "objective", "SB lb", "SAB lb", "remaining %", "SB s", "SAB s"
    );
    for n in [2, 3, 6] {
        let row = run_caroe_row(
            &CaroeSchultzSpec {
                n,
                discrete_first_stage: discrete,
            },
            iterations,
        )?;
        println!(
            "{:>3} {:>10.3} {:>10.3} {:>10.3} {:>12.2} {:>8.2} {:>8.2}",
            n,
            row.objective,
            row.sb_lb,
            row.sab_lb,
            row.remaining_percent(),
            row.sb_secs,
            row.sab_secs
        );
    }
    Ok(())
}
