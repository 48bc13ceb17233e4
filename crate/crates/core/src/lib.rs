//! Coupled local/nonlocal diffusion on a partitioned interval.
//!
//! The domain is split into two disjoint intervals `A` and `B`. On `A` the
//! unknown `u` obeys a Neumann heat (or stationary) equation, on `B` the
//! unknown `v` obeys a nonlocal jump balance (or evolution) with kernel `G`,
//! and the two exchange mass through a transmission kernel `J`:
//!
//! ```text
//! u_t = Δu + ∫_B J(x-y)(v(y) - u(x)) dy                  on A
//! 0   = ∫_B G(x-y)(v(y) - v(x)) dy + ∫_A J(x-y)(u(y) - v(x)) dy   on B
//! ```
//!
//! The second model swaps which side carries the time derivative.
//!
//! The crate is `no_std` (with `alloc`). Everything is dense and sized for
//! grids of a few hundred cells per subdomain.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::needless_range_loop))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod elliptic;
pub mod energy;
pub mod epsilon;
mod error;
pub mod evolution;
pub mod kernel;
pub mod linalg;
pub mod mesh;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{ModelKind, State, TimeScheme, Trajectory};
pub use kernel::{Kernel, Profile};
pub use mesh::{assemble_system, DiscreteSystem, Grid, Interval, Partition1D};

pub use nalgebra::{DMatrix, DVector};
