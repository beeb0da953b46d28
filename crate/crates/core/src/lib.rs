//! Open quantum systems workbench.
//!
//! Interferometric decoherence, closed and open density-operator dynamics,
//! Gaussian influence functionals, decoherence-free subspaces and coherent
//! error correction, radical-pair spin chemistry, and the paired-t statistics
//! pipeline, all on dense finite-dimensional linear algebra.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compensation;
pub mod error;
pub mod hilbert;
pub mod influence;
pub mod evolution;
pub mod interferometer;
pub mod radical_pair;
pub mod stats;

pub use error::{Error, Result};

/// Seed used wherever a command or fixture needs randomness and none is
/// given. All randomness flows through ChaCha8 (`rand_chacha::ChaCha8Rng`)
/// seeded with `seed_from_u64`.
pub const DEFAULT_SEED: u64 = 42;

