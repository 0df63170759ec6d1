//! Forward/backward cut generation over scenario trees.

mod config;
mod reverse;
mod run;
mod simulate;
mod walk;

pub use config::{Mode, PoolSharing, RhoRule, SldpConfig};
pub use reverse::{reverse_cut_minimize, ReverseCutResult};
pub use run::{run, run_full, run_sampled, stabilize_state, IterationRecord, RunResult};
pub use simulate::{simulate_policy, PolicyEstimate};
