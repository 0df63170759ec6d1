//! Openings needed by tight reverse-norm cuts on a discontinuous value
//! function.
//!
//! The value of `min x - k` over integers `k <= x` is the fractional part of
//! `x`. A reverse-norm cut tight at a center just below an integer must drop
//! to 0 within a short distance, so the smallest valid opening grows without
//! bound as the center approaches the jump.

use sldp::bench::fractional_part_value;
use sldp::cuts::minimal_valid_rho;
use sldp::milp::SolverOptions;

fn main() -> sldp::Result<()> {
    let opts = SolverOptions::default();
    let mut samples = Vec::new();
    for i in 0..=2000 {
        let x = i as f64 / 1000.0;
        samples.push((vec![x], fractional_part_value(x, &opts)?));
    }
    println!("{:>8} {:>10} {:>12}", "center", "value", "min rho");
    for c in [0.5, 0.9, 0.99, 0.999] {
        let v = fractional_part_value(c, &opts)?;
        let rho = minimal_valid_rho(&[c], v, &samples);
        println!("{c:>8} {v:>10.4} {rho:>12.3}");
    }
    Ok(())
}
