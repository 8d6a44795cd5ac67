//! Shared fixtures for the benchmark suite: prebuilt classes, channels, and
//! seeded vector sets, so the timed loops in `benches/suite.rs` measure the
//! algorithms rather than input construction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qsc_core::gates::parse_gate_word;
use qsc_core::{stream_rng, QuantumChannel, SampleSet};

/// Stream tag for benchmark inputs; disjoint from library and test phases.
const PHASE_BENCH: u64 = 60;

/// The T gate as a channel.
pub fn t_channel() -> QuantumChannel {
    parse_gate_word(1, "T0").expect("T parses")
}

/// A seeded random set of `size` vectors in R^m with entries in [-1, 1].
pub fn random_vector_set(m: usize, size: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng: ChaCha8Rng = stream_rng(seed, PHASE_BENCH, 0);
    (0..size)
        .map(|_| (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect()
}

/// A seeded random sample set of `m` pairs on `n` qubits.
pub fn random_sample_set(n: usize, m: usize, seed: u64) -> SampleSet {
    let mut rng: ChaCha8Rng = stream_rng(seed, PHASE_BENCH, 1);
    let d = 1usize << n;
    let indices: Vec<(usize, usize)> = (0..m)
        .map(|_| (rng.gen_range(0..d), rng.gen_range(0..d)))
        .collect();
    SampleSet::from_indices(n, &indices).expect("indices in range")
}
