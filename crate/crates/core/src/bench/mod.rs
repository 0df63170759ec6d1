//! Benchmark generators and the exhaustive backward-recursion oracle.

mod caroe;
mod control;
mod fractional;
mod oracle;
mod suite;

pub use caroe::{caroe_grid, gen_caroe_schultz, CaroeSchultzSpec, CAROE_ROW_WEIGHTS, CAROE_Y_COSTS};
pub use control::{gen_control1d, ControlProblemSpec};
pub use fractional::{fractional_part_milp, fractional_part_value};
pub use oracle::{exact_expected_ctg, grid_points, write_grid_csv, Oracle, OracleTable};
pub use suite::{
    caroe_grid_table, caroe_objective, caroe_sldp_config, control_sldp_config, run_caroe_row, run_control_suite, CaroeRow,
    ControlRow,
};
