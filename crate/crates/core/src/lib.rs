//! # onebit
//!
//! Numerical toolkit for information-theoretic reconstructions of the qubit:
//!
//! - [`measures`]: degree-α (Havrda–Charvát / Tsallis) entropies and total
//!   uncertainty over complete sets of complementary measurements.
//! - [`qubit`]: probability 6-vectors and their mean-value vectors.
//! - [`transforms`]: maps on probability vectors induced by frame changes,
//!   invariance scans over α and a search for α-norm preservers.
//! - [`highdim`]: N-level systems. Degree-of-freedom counting, plus a
//!   positivity test for density operators built on post-selected qubits.
//! - [`cli`]: the command implementations behind the `onebit` binary.
//!
//! All randomness flows through [`seed::SeedStream`], so every scan is
//! reproducible from one 64-bit seed.

// `!(x <= tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod highdim;
pub mod measures;
pub mod qubit;
pub mod seed;
pub mod transforms;

pub use error::{Error, Result};
pub use highdim::{
    counting_consistency, degrees_of_freedom, eigen_positivity_oracle, gpt_from_density, hierarchy_k,
    info_positivity_check, minor_condition, pair_uncertainty, postselect, Basis, GptStateN, HermitianOperator,
    PositivityVerdict, Strategy, Witness,
};
pub use measures::{entropy, normalized_measure, total_uncertainty, Distribution, EntropyMeasure};
pub use qubit::{
    is_pure, malus_probability, mean_from_probabilities, probabilities_from_mean, random_state,
    total_uncertainty_state, ComplementaryFrame, MeanValueVector, QubitState, StateKind,
};
pub use seed::SeedStream;
pub use transforms::{
    alpha_norm_deviation, apply, example_permutation_map, induced_from_rotation, invariance_scan, is_permutation_type,
    is_sector_stochastic, search_norm_preservers, InducedMap, InvarianceReport,
};
