//! Seeded instances shared by the solver benchmarks.

use tfn_core::scenarios::random_contracting_network;
use tfn_core::{FeedbackNetwork, Operator, SplitterParams, StateVector};

/// Random unitary network at `dim` with a fixed splitter.
pub fn unitary_network(dim: usize, seed: u64) -> (FeedbackNetwork, StateVector) {
    let net = FeedbackNetwork::new(
        Operator::random_unitary(dim, seed).unwrap(),
        Operator::random_unitary(dim, seed + 1).unwrap(),
        Operator::random_unitary(dim, seed + 2).unwrap(),
        SplitterParams::from_beta(0.4).unwrap(),
    )
    .unwrap();
    (net, StateVector::random(dim, seed + 3).unwrap())
}

/// Network whose loop map has spectral radius at most `radius`.
pub fn contracting_network(dim: usize, seed: u64, radius: f64) -> (FeedbackNetwork, StateVector) {
    random_contracting_network(dim, seed, radius).unwrap()
}
