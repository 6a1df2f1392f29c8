//! Shared fixtures for the criterion benchmarks.

use svsim::{Complex64, StateVector};

/// Deterministic normalized state: amplitudes from a small LCG so the bench
/// crate needs no RNG dependency.
pub fn workload_state(n_qubits: usize, seed: u64) -> StateVector {
    let mut x = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| Complex64::new(next(), next()))
        .collect();
    let mut sv = StateVector::from_amplitudes(&amps).expect("valid size");
    sv.normalize();
    sv
}
