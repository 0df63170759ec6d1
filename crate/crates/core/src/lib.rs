//! Stochastic Lipschitz dynamic programming for multistage stochastic
//! mixed-integer linear programs.

pub mod bench;
pub mod cuts;
pub mod engine;
pub mod error;
pub mod io;
pub mod milp;
pub mod model;
pub mod stage;
pub mod tree;

pub use error::{Error, Result};
