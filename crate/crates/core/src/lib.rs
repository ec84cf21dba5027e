//! Kernels for two random walks on the integers that repel each other
//! through their histories.
//!
//! Walk `i` steps right with probability `1 / (1 + exp(beta * y_j))`, where
//! `y_j` is the partner's net displacement per step. The left/right
//! occupation proportions form a stochastic approximation of the ODE
//! `dx/dt = -x + pi(x)`; this crate simulates the walks exactly and analyses
//! that ODE:
//!
//! - [`walk`]: exact process simulation with integer counts.
//! - [`field`]: the vector field, its Jacobian, spectra and divergence.
//! - [`equilibria`]: zeros of the field and their stability across `beta`.
//! - [`flow`]: certified RK4 integration, boundary behavior, attraction rates.
//! - [`coupling`]: the independent-increment comparison walk and its coupling.
//! - [`experiment`]: single-replica Monte Carlo kernels.
//!
//! The crate is `no_std` with `alloc`. The `parallel` feature spreads
//! replica loops over rayon without changing any result.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod coupling;
pub mod equilibria;
pub mod error;
pub mod experiment;
pub mod field;
pub mod flow;
pub mod params;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use nalgebra::Complex;
pub use params::RepulsionParams;
pub use rng::RngStreamSpec;
pub use walk::{InitialHistory, OccupationState, TangentVector, WalkPairState};

use alloc::vec::Vec;

/// Evaluates `f(0), ..., f(count - 1)` and returns the results in index order.
#[cfg(feature = "parallel")]
pub fn replicate<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Evaluates `f(0), ..., f(count - 1)` and returns the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn replicate<T, F>(count: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(f).collect()
}
