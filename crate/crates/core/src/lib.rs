//! Actuator security indices for linear networked control systems.
//!
//! * [`exact_index`]: the security index `δ` of an actuator, by exhaustive
//!   search over attack sets with a normal-rank test on the transfer matrix.
//! * [`robust_index`]: the structural (robust) index `δ_r`, via a minimum
//!   `u_i`–`t` cut on a node-split flow network.
//! * [`placement`]: sensor placements that raise `δ_r`, with greedy
//!   submodular solvers and exhaustive optima for small instances.
//! * [`attack`]: synthesis and simulation of feedforward, local-feedback
//!   and replay attacks.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod attack;
pub mod cli;
pub mod error;
pub mod exact_index;
pub mod model;
pub mod placement;
pub mod robust_index;
pub mod transfer;

mod value;

pub use error::{Error, Result};
pub use model::{ComponentSet, Realization, StructuralModel};
pub use value::IndexValue;
