//! Two-means clustering with deterministic Contour coresets and simulated
//! variational quantum solvers.
//!
//! The crate follows the hybrid workflow end to end:
//!
//! 1. build or load a [`Dataset`](dataset::Dataset),
//! 2. summarise it with a weighted [`Coreset`](coreset::Coreset) of a few points,
//! 3. compile the weighted 2-means objective of the coreset into a diagonal
//!    Pauli-Z [`ZPolynomial`](hamiltonian::ZPolynomial) (Taylor orders 0, 1, 2),
//! 4. find a low-energy partition with a VQE ansatz, QAOA, or brute force,
//! 5. turn the partition into two centroids and label the full dataset,
//! 6. score the labelling against classical Lloyd 2-means.
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `contour` binary for the command-line front end.

pub mod cli;
pub mod coreset;
pub mod dataset;
pub mod error;
pub mod hamiltonian;
pub mod optimize;
pub mod pipeline;
pub mod quantum;
pub(crate) mod seeds;

pub use error::{Error, Result};
