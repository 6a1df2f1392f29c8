//! Dense state vector and the bitwise gate-application engine.

mod kernels;
mod masks;

pub use kernels::{
    apply_controlled_matrix, apply_controlled_single_qubit, apply_matrix, apply_single_qubit,
    matrix_path, pair_indices, CoefficientInteraction, MatrixPath,
};
pub use masks::{get_masks, MaskSet};

pub(crate) use kernels::{offset_of, qubits_of};

use num_complex::Complex;

use crate::aligned::AlignedBuf;
use crate::error::{Result, SimError};
use crate::matrix::Matrix;
use crate::precision::Real;

/// Largest register the index arithmetic supports (masks are 64-bit).
pub const MAX_QUBITS: usize = 62;

/// `2^n_qubits` complex amplitudes. Qubit 0 is the most significant index bit.
///
/// Gate-level multithreading is off by default; see [`StateVector::set_threads`].
#[derive(Clone)]
pub struct StateVector<T: Real = f64> {
    n_qubits: usize,
    amps: AlignedBuf<T>,
    threads: usize,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new_zero_state(n_qubits: usize) -> Result<Self> {
        let mut amps = Self::allocate(n_qubits)?;
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector {
            n_qubits,
            amps,
            threads: 1,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut sv = Self::new_zero_state(n_qubits)?;
        if index >= sv.len() {
            return Err(SimError::invalid(format!(
                "basis index {index} outside a {n_qubits}-qubit register"
            )));
        }
        sv.amps[0] = Complex::new(T::zero(), T::zero());
        sv.amps[index] = Complex::new(T::one(), T::zero());
        Ok(sv)
    }

    /// Wraps existing amplitudes; the length must be a power of two ≥ 2.
    /// No normalization is applied.
    pub fn from_amplitudes(amps: &[Complex<T>]) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(SimError::invalid(format!(
                "{} amplitudes do not form a qubit register",
                amps.len()
            )));
        }
        let n_qubits = qubits_of(amps.len());
        let buf = AlignedBuf::from_slice(amps).ok_or_else(|| SimError::Capacity {
            n_qubits,
            reason: "allocation failed".into(),
        })?;
        Ok(StateVector {
            n_qubits,
            amps: buf,
            threads: 1,
        })
    }

    fn allocate(n_qubits: usize) -> Result<AlignedBuf<T>> {
        if n_qubits == 0 {
            return Err(SimError::EmptyRegister);
        }
        if n_qubits > MAX_QUBITS {
            return Err(SimError::Capacity {
                n_qubits,
                reason: format!("index arithmetic is limited to {MAX_QUBITS} qubits"),
            });
        }
        let len = 1usize
            .checked_shl(n_qubits as u32)
            .filter(|_| n_qubits < usize::BITS as usize)
            .ok_or_else(|| SimError::Capacity {
                n_qubits,
                reason: "amplitude count overflows the address space".into(),
            })?;
        AlignedBuf::zeroed(len).ok_or_else(|| SimError::Capacity {
            n_qubits,
            reason: format!(
                "allocation of {} amplitudes ({} bytes each) failed",
                len,
                std::mem::size_of::<Complex<T>>()
            ),
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Worker threads used by the pair loops. `1` (the default) runs inline.
    pub fn set_threads(&mut self, threads: usize) {
        self.threads = threads.max(1);
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.set_threads(threads);
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr().to_f64()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = T::from_f64(self.norm_sqr().sqrt());
        if norm > T::zero() {
            for a in self.amps.iter_mut() {
                *a = *a / norm;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<f64> {
        assert_eq!(
            self.len(),
            other.len(),
            "inner product of unequal registers"
        );
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(0.0, 0.0), |acc, (a, b)| {
                let p = a.conj() * b;
                acc + Complex::new(p.re.to_f64(), p.im.to_f64())
            })
    }

    pub fn reset(&mut self) {
        self.amps.fill(Complex::new(T::zero(), T::zero()));
        self.amps[0] = Complex::new(T::one(), T::zero());
    }

    /// Overwrites the amplitudes with `other`'s (registers must match).
    pub fn copy_from(&mut self, other: &Self) {
        self.amps.copy_from_slice(&other.amps);
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (*a - *b).norm().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn apply_single_qubit<F>(&mut self, q: usize, f: &F) -> Result<()>
    where
        F: CoefficientInteraction<T> + ?Sized,
    {
        apply_single_qubit(&mut self.amps, q, f, self.threads)
    }

    /// Controlled single-qubit gate; `ctrl_values` defaults to all ones.
    pub fn apply_controlled_single_qubit<F>(
        &mut self,
        ctrls: &[usize],
        ctrl_values: Option<&[bool]>,
        q: usize,
        f: &F,
    ) -> Result<()>
    where
        F: CoefficientInteraction<T> + ?Sized,
    {
        apply_controlled_single_qubit(&mut self.amps, ctrls, ctrl_values, q, f, self.threads)
    }

    /// Applies an arbitrary (not necessarily unitary) matrix to `wires`.
    pub fn apply_matrix(&mut self, wires: &[usize], matrix: &Matrix<T>) -> Result<()> {
        apply_matrix(&mut self.amps, wires, matrix, self.threads)
    }

    /// Like [`StateVector::apply_matrix`], but rejects non-unitary matrices.
    pub fn apply_matrix_checked(&mut self, wires: &[usize], matrix: &Matrix<T>) -> Result<()> {
        let tol = T::NORM_TOL.sqrt();
        if !matrix.is_unitary(tol) {
            return Err(SimError::invalid(format!(
                "matrix is not unitary (max |U†U − I| = {:.3e})",
                matrix.unitarity_error()
            )));
        }
        self.apply_matrix(wires, matrix)
    }

    pub fn apply_controlled_matrix(
        &mut self,
        ctrls: &[usize],
        ctrl_values: Option<&[bool]>,
        wires: &[usize],
        matrix: &Matrix<T>,
    ) -> Result<()> {
        apply_controlled_matrix(
            &mut self.amps,
            ctrls,
            ctrl_values,
            wires,
            matrix,
            self.threads,
        )
    }
}

impl<T: Real> std::fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateVector")
            .field("n_qubits", &self.n_qubits)
            .field("amplitudes", &self.amps)
            .finish()
    }
}
