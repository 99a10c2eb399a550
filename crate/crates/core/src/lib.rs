//! Convergent cluster expansion for the ground-state energy of the massless
//! spin-boson model, through its reduction to a long-range Ising model on the
//! line driven by a ±1 jump process.
//!
//! Layers, bottom up:
//!
//! * [`kernel`]: the pair interaction `h`, its norms and antiderivative;
//! * [`jump`]: the jump process, Monte Carlo estimates of `Z(α, T)` and the
//!   closed-form spin moments;
//! * [`combinatorics`]: perfect matchings, block partitions, forest
//!   selections, interpolated couplings, cycle openings, tree counting;
//! * [`integrator`]: cluster-term integrands and the connected coefficients;
//! * [`series`]: the energy series, radius and remainder bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod error;
pub mod integrator;
pub mod jump;
pub mod kernel;
pub mod quad;
pub mod rng;
pub mod series;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{Kernel, KernelSpec};
pub use stats::MCEstimate;
