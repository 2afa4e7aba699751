//! Leader-following consensus of second-order agents with coupling delays.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation:
//!
//! * [`digraph`]: weighted interconnection digraphs, Laplacians, strong
//!   components and the reachability tests that decide solvability.
//! * [`linalg`]: a small dense kernel (LU solves, QR and Jacobi
//!   eigenvalues, Cholesky, spectral norm, Kronecker products and the
//!   continuous Lyapunov solver).
//! * [`stability`]: gain thresholds, Razumikhin `Q` matrices and the
//!   admissible delay bounds for fixed and switched topologies.
//! * [`sim`]: a fixed-step RK4 integrator for the delayed closed loop with
//!   time-varying delay and switching.
//!
//! Node indices are zero-based throughout the library. The leader is never a
//! graph node; it enters through [`LeaderTopology::leader_weights`].

#![no_std]
#![deny(missing_docs)]
// `!(a > b)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod digraph;
mod error;
pub mod linalg;
mod matrix;
pub mod sim;
pub mod stability;

pub use digraph::{LeaderTopology, WeightedDigraph};
pub use error::{Error, Result};
pub use matrix::Matrix;
