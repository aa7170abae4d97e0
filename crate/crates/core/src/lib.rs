//! Upper bounds on information propagation speed in sparse mobile
//! delay-tolerant networks, and an epidemic-broadcast simulator to check
//! them against.
//!
//! * [`specfun`]: Bessel functions and the per-dimension Laplace transforms.
//! * [`kernel`]: the kernel equation and the `min θ/ρ` speed bound.
//! * [`sim`]: billiard / random-walk nodes with unit-disk flooding.
//! * [`stats`]: propagation curves, slope fits and the domination check.
//! * [`cli`]: the `dtn-speed` command line.

// Negated comparisons are deliberate: NaN must fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli;
pub mod error;
pub mod kernel;
mod optimize;
pub mod sim;
pub mod specfun;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};
pub use kernel::{speed_bound, BoundStatus, KernelPoint, ModelParams, SpeedBound};
pub use sim::{run_epidemic, InfectionRecord, SimConfig, SourcePlacement, World};
pub use specfun::Dim;
