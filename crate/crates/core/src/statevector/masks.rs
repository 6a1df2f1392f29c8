//! Bit masks for iterating over amplitude indices with some bits held fixed.

use crate::error::{Result, SimError};

/// Masks that spread a compact counter `k` over the index bits that are not
/// excluded. `masks[i]` covers the free bits between the `(i-1)`-th and
/// `i`-th excluded offsets (ascending), so that
/// `Σ_i ((k << i) & masks[i])` inserts a zero at every excluded position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSet {
    /// `n_excluded + 1` disjoint masks, lowest bits first.
    pub masks: Vec<u64>,
    /// `1 << offset` for every excluded offset, ascending.
    pub strides: Vec<u64>,
    n_qubits: usize,
}

/// Builds the mask set for the given excluded bit offsets within an
/// `n_qubits`-bit window. Offsets are sorted internally.
pub fn get_masks(excluded_bit_offsets: &[usize], n_qubits: usize) -> Result<MaskSet> {
    if n_qubits > crate::statevector::MAX_QUBITS {
        return Err(SimError::Capacity {
            n_qubits,
            reason: format!(
                "at most {} qubits are addressable",
                crate::statevector::MAX_QUBITS
            ),
        });
    }
    let mut bits = excluded_bit_offsets.to_vec();
    bits.sort_unstable();
    for (i, &b) in bits.iter().enumerate() {
        if b >= n_qubits {
            return Err(SimError::invalid(format!(
                "bit offset {b} outside a {n_qubits}-bit window"
            )));
        }
        if i > 0 && bits[i - 1] == b {
            return Err(SimError::invalid(format!("bit offset {b} excluded twice")));
        }
    }

    let window = (1u64 << n_qubits) - 1;
    let below = |bit: usize| (1u64 << bit) - 1;
    let mut masks = Vec::with_capacity(bits.len() + 1);
    let mut lo = 0usize;
    for &b in &bits {
        masks.push(below(b) & !below(lo));
        lo = b + 1;
    }
    masks.push(window & !below(lo));

    Ok(MaskSet {
        masks,
        strides: bits.iter().map(|&b| 1u64 << b).collect(),
        n_qubits,
    })
}

impl MaskSet {
    /// Spreads `k` over the free bits, leaving every excluded bit zero.
    #[inline(always)]
    pub fn expand(&self, k: u64) -> u64 {
        let mut i0 = k & self.masks[0];
        for (i, &m) in self.masks.iter().enumerate().skip(1) {
            i0 |= (k << i) & m;
        }
        i0
    }

    /// Number of distinct values `expand` produces.
    pub fn free_count(&self) -> u64 {
        1u64 << (self.n_qubits - self.strides.len())
    }
}
