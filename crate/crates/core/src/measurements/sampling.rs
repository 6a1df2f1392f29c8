//! Finite-shot sampling by inverse-CDF lookup.
//!
//! Algorithm (format version 1):
//! 1. `cdf[i] = cdf[i-1] + |a_i|²`, accumulated sequentially in `f64`.
//! 2. A `ChaCha8` generator seeded with `seed_from_u64(seed)` draws one
//!    `f64` in `[0, 1)` per shot; the target is `u · cdf[last]`.
//! 3. The outcome is the first index with `cdf[i] > target`; a target at or
//!    beyond the total (rounding) maps to the last index with nonzero weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};

pub const SAMPLER_VERSION: u32 = 1;

/// Sampled computational-basis outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    pub shots: usize,
    pub n_qubits: usize,
    pub seed: u64,
    /// Basis index of each shot.
    pub indices: Vec<usize>,
}

impl SampleSet {
    /// Bit of `qubit` in shot `shot` (qubit 0 is the most significant bit).
    pub fn bit(&self, shot: usize, qubit: usize) -> u8 {
        ((self.indices[shot] >> (self.n_qubits - qubit - 1)) & 1) as u8
    }

    /// Each shot as a row of bits, qubit 0 first.
    pub fn bitstrings(&self) -> Vec<Vec<u8>> {
        (0..self.shots)
            .map(|s| (0..self.n_qubits).map(|q| self.bit(s, q)).collect())
            .collect()
    }

    /// Each shot as a `"0101"`-style string.
    pub fn bitstring_labels(&self) -> Vec<String> {
        self.indices
            .iter()
            .map(|&i| format!("{:0width$b}", i, width = self.n_qubits))
            .collect()
    }

    /// Occurrence count per basis index.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; 1 << self.n_qubits];
        for &i in &self.indices {
            c[i] += 1;
        }
        c
    }
}

/// Sequential running sum of `weights`.
pub fn cumulative(weights: impl IntoIterator<Item = f64>, start: f64) -> Vec<f64> {
    let mut acc = start;
    weights
        .into_iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// One uniform draw in `[0, 1)` per shot.
pub fn uniforms(shots: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..shots).map(|_| rng.random::<f64>()).collect()
}

/// First position with `cdf[i] > target`, if any.
#[inline]
pub fn locate(cdf: &[f64], target: f64) -> Option<usize> {
    let i = cdf.partition_point(|&c| c <= target);
    (i < cdf.len()).then_some(i)
}

/// Index of the last nonzero weight in a running sum.
pub fn last_nonzero(cdf: &[f64], start: f64) -> Option<usize> {
    let mut prev = start;
    let mut last = None;
    for (i, &c) in cdf.iter().enumerate() {
        if c > prev {
            last = Some(i);
        }
        prev = c;
    }
    last
}

pub(crate) fn check_shots(shots: usize) -> Result<()> {
    if shots == 0 {
        return Err(SimError::invalid("at least one shot is required"));
    }
    Ok(())
}

/// Draws `shots` indices from the (unnormalized) probability vector.
pub fn sample_probabilities(probs: &[f64], shots: usize, seed: u64) -> Result<Vec<usize>> {
    check_shots(shots)?;
    let cdf = cumulative(probs.iter().copied(), 0.0);
    let total = *cdf.last().expect("nonempty register");
    if total <= 0.0 || !total.is_finite() {
        return Err(SimError::invalid(
            "cannot sample from a zero or non-finite state",
        ));
    }
    let fallback = last_nonzero(&cdf, 0.0).expect("positive total");
    Ok(uniforms(shots, seed)
        .into_iter()
        .map(|u| locate(&cdf, u * total).unwrap_or(fallback))
        .collect())
}
