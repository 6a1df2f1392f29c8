//! Measurement processes: probabilities, expectation values, variances and sampling.

mod observable;
mod sampling;

pub use observable::{CsrMatrix, Hamiltonian, Observable, Pauli, PauliWord};
pub use sampling::{
    cumulative, last_nonzero, locate, sample_probabilities, uniforms, SampleSet, SAMPLER_VERSION,
};

use num_complex::Complex;

use crate::error::{check_wires, Result, SimError};
use crate::precision::Real;
use crate::statevector::{offset_of, StateVector};

/// Marginal probabilities over `wires` (all wires, in order, when `None`).
/// `wires[0]` is the most significant bit of the result index.
pub fn probabilities<T: Real>(sv: &StateVector<T>, wires: Option<&[usize]>) -> Result<Vec<f64>> {
    let n = sv.n_qubits();
    let amps = sv.amplitudes();
    let Some(wires) = wires else {
        return Ok(amps.iter().map(|a| a.norm_sqr().to_f64()).collect());
    };
    check_wires(wires, n)?;
    Ok(marginal(amps, wires, n))
}

/// Marginal over `wires` by direct accumulation. `amps` may be a block of a
/// larger register whose index bits above `n_qubits` are fixed.
pub(crate) fn marginal<T: Real>(amps: &[Complex<T>], wires: &[usize], n_qubits: usize) -> Vec<f64> {
    let w = wires.len();
    let offsets: Vec<usize> = wires.iter().map(|&q| offset_of(q, n_qubits)).collect();
    let mut out = vec![0.0; 1 << w];
    for (i, a) in amps.iter().enumerate() {
        let mut r = 0usize;
        for &o in &offsets {
            r = (r << 1) | ((i >> o) & 1);
        }
        out[r] += a.norm_sqr().to_f64();
    }
    out
}

/// `⟨ψ|P|ψ⟩` for a Pauli word, without copying the state.
pub fn expval_pauli_word<T: Real>(sv: &StateVector<T>, word: &PauliWord) -> Result<f64> {
    check_wires(&word.wires().collect::<Vec<_>>(), sv.n_qubits())?;
    Ok(pauli_expval_block(sv.amplitudes(), word, sv.n_qubits(), 0))
}

/// Real part of `Σ_j conj(a[j ^ flip]) · phase(j) · a[j]` over one block.
/// `base` is the global index of the block's first amplitude and is only
/// needed for sign bits that lie above the block.
pub(crate) fn pauli_expval_block<T: Real>(
    amps: &[Complex<T>],
    word: &PauliWord,
    n_qubits: usize,
    base: usize,
) -> f64 {
    let (flip, sign, n_y) = word.index_masks(n_qubits);
    let mut acc = 0.0f64;
    for (j, a) in amps.iter().enumerate() {
        let partner = amps[j ^ flip];
        let s = if ((base + j) & sign).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let p = partner.conj() * a;
        // Multiply by i^{n_y} and keep the real part.
        let re = match n_y % 4 {
            0 => p.re.to_f64(),
            1 => -p.im.to_f64(),
            2 => -p.re.to_f64(),
            _ => p.im.to_f64(),
        };
        acc += s * re;
    }
    acc
}

pub fn expval<T: Real>(sv: &StateVector<T>, obs: &Observable) -> Result<f64> {
    obs.validate(sv.n_qubits())?;
    match obs {
        Observable::PauliWord(p) => expval_pauli_word(sv, p),
        Observable::Hamiltonian(h) => h
            .coeffs()
            .iter()
            .zip(h.terms())
            .try_fold(0.0, |acc, (&c, t)| Ok(acc + c * expval_pauli_word(sv, t)?)),
        Observable::DenseHermitian { .. } => {
            let mut tmp = sv.clone();
            obs.apply_to(&mut tmp)?;
            Ok(sv.inner(&tmp).re)
        }
        Observable::SparseHermitian(m) => expval_sparse(sv, m),
    }
}

pub fn expval_sparse<T: Real>(sv: &StateVector<T>, m: &CsrMatrix) -> Result<f64> {
    if m.dim() != sv.len() {
        return Err(SimError::DimensionMismatch {
            expected: sv.len(),
            got: m.dim(),
        });
    }
    let amps = sv.amplitudes();
    let mut acc = 0.0;
    for (r, a) in amps.iter().enumerate() {
        let a = Complex::new(a.re.to_f64(), a.im.to_f64());
        let row = m.row(r).fold(Complex::new(0.0, 0.0), |s, (c, v)| {
            s + v * Complex::new(amps[c].re.to_f64(), amps[c].im.to_f64())
        });
        acc += (a.conj() * row).re;
    }
    Ok(acc)
}

/// `⟨O²⟩ − ⟨O⟩²`, with `⟨O²⟩ = ‖O|ψ⟩‖²` for Hermitian `O`.
pub fn variance<T: Real>(sv: &StateVector<T>, obs: &Observable) -> Result<f64> {
    let mean = expval(sv, obs)?;
    let mut tmp = sv.clone();
    obs.apply_to(&mut tmp)?;
    Ok(tmp.norm_sqr() - mean * mean)
}

pub fn sample<T: Real>(sv: &StateVector<T>, shots: usize, seed: u64) -> Result<SampleSet> {
    let probs = probabilities(sv, None)?;
    let indices = sample_probabilities(&probs, shots, seed)?;
    Ok(SampleSet {
        shots,
        n_qubits: sv.n_qubits(),
        seed,
        indices,
    })
}
