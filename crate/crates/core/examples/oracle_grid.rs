//! Exact expected cost-to-go of the Carøe–Schultz instances on the integer
//! first-stage grid, from exhaustive backward recursion.
//!
//! `cargo run --release --example oracle_grid -- [N]` prints the table for
//! one instance (default N = 2) and the optimum.

use sldp::bench::{caroe_grid_table, CaroeSchultzSpec};

fn main() -> sldp::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let (objective, table) = caroe_grid_table(
        &CaroeSchultzSpec {
            n,
            discrete_first_stage: true,
        },
        1.0,
    )?;
    println!("expected second-stage cost, N = {n} (rows x1, columns x2)");
    print!("{:>5}", "");
    for x2 in 0..=5 {
        print!("{x2:>9}");
    }
    println!();
    for x1 in 0..=5 {
        print!("{x1:>5}");
        for x2 in 0..=5 {
            let (_, v) = table
                .points
                .iter()
                .find(|(x, _)| x[0] == x1 as f64 && x[1] == x2 as f64)
                .expect("grid point");
            print!("{v:>9.3}");
        }
        println!();
    }
    println!("optimum {objective:.3}");
    Ok(())
}
