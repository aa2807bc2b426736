//! Shared fixtures for the benchmarks.

use normprod_core::{generate_instance, ProblemInstance, StreamKey};

pub const N: usize = 100;
pub const K: usize = 3;

/// The seeded `N × m` instance every benchmark uses.
pub fn instance(m: usize) -> ProblemInstance {
    generate_instance(N, m, K, StreamKey::new(2024)).expect("valid dimensions")
}
