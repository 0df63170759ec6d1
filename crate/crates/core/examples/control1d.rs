//! Eight-stage tracking problem with a binary control: convex cuts versus
//! reverse-norm and augmented cuts, with sampled forward passes on a tree
//! too large to build.
//!
//! `cargo run --release --example control1d -- [iterations]` (default 100).

use sldp::bench::{run_control_suite, ControlProblemSpec};

fn main() -> sldp::Result<()> {
    env_logger::init();
    let iterations: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let spec = ControlProblemSpec::default();
    println!("noise {:?}, horizon {}, discount {}", spec.noise, spec.horizon, spec.beta);
    println!("{:>5} {:>9} {:>9} {:>9} {:>8}", "cuts", "lb", "ub", "ub se", "secs");
    for row in run_control_suite(&spec, iterations, 200, 0)? {
        println!(
            "{:>5} {:>9.3} {:>9.3} {:>9.3} {:>8.1}",
            row.method.as_str(),
            row.lb,
            row.ub_mean,
            row.ub_std_error,
            row.secs
        );
    }
    Ok(())
}
