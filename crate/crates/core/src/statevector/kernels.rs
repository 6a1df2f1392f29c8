//! Index-arithmetic gate kernels over raw amplitude slices.
//!
//! Qubit 0 is the most significant bit of an amplitude index, so a gate on
//! qubit `q` of an `n`-qubit register couples amplitudes `2^(n-q-1)` apart.

use num_complex::Complex;

use super::masks::{get_masks, MaskSet};
use crate::error::{check_wires, Result, SimError};
use crate::matrix::Matrix;
use crate::parallel::{for_each_range, SendPtr};
use crate::precision::Real;

/// The two-amplitude update that defines a single-qubit gate.
pub trait CoefficientInteraction<T: Real>: Sync {
    /// Updates the amplitude pair `(a0, a1)` where `a1`'s index has the target bit set.
    fn update(&self, a0: &mut Complex<T>, a1: &mut Complex<T>);

    /// Applies the update to `sv[i0]`, `sv[i1]`.
    #[inline(always)]
    fn interact(&self, sv: &mut [Complex<T>], i0: usize, i1: usize) {
        assert!(i0 < i1, "pair indices must be ordered");
        let (lo, hi) = sv.split_at_mut(i1);
        self.update(&mut lo[i0], &mut hi[0]);
    }
}

impl<T: Real, F> CoefficientInteraction<T> for F
where
    F: Fn(&mut Complex<T>, &mut Complex<T>) + Sync,
{
    #[inline(always)]
    fn update(&self, a0: &mut Complex<T>, a1: &mut Complex<T>) {
        self(a0, a1)
    }
}

/// Number of qubits encoded by a slice length.
pub(crate) fn qubits_of(len: usize) -> usize {
    debug_assert!(len.is_power_of_two());
    len.trailing_zeros() as usize
}

#[inline(always)]
pub(crate) fn offset_of(q: usize, n_qubits: usize) -> usize {
    n_qubits - q - 1
}

/// Low/high masks for the uncontrolled pair loop.
#[inline]
pub(crate) fn single_qubit_masks(q_offset: usize) -> (u64, u64) {
    const BIT_WIDTH: usize = 64;
    let mask_high = u64::MAX << (q_offset + 1);
    // A shift by the full bit width is undefined; nothing lies below bit 0.
    let mask_low = if q_offset == 0 {
        0
    } else {
        u64::MAX >> (BIT_WIDTH - q_offset)
    };
    (mask_low, mask_high)
}

/// The `(i0, i1)` pair visited at loop counter `k` for a gate on `q`.
#[inline(always)]
pub fn pair_indices(k: u64, q: usize, n_qubits: usize) -> (usize, usize) {
    let q_offset = offset_of(q, n_qubits);
    let (mask_low, mask_high) = single_qubit_masks(q_offset);
    let i0 = ((2 * k) & mask_high) | (mask_low & k);
    (i0 as usize, (i0 | (1 << q_offset)) as usize)
}

pub fn apply_single_qubit<T, F>(
    amps: &mut [Complex<T>],
    q: usize,
    f: &F,
    threads: usize,
) -> Result<()>
where
    T: Real,
    F: CoefficientInteraction<T> + ?Sized,
{
    let n_qubits = qubits_of(amps.len());
    check_wires(&[q], n_qubits)?;
    let q_offset = offset_of(q, n_qubits);
    let stride = 1u64 << q_offset;
    let (mask_low, mask_high) = single_qubit_masks(q_offset);
    let ptr = SendPtr(amps.as_mut_ptr());
    for_each_range(amps.len() / 2, threads, |start, end| {
        let p = ptr.get();
        for k in start as u64..end as u64 {
            let i0 = ((2 * k) & mask_high) | (mask_low & k);
            let i1 = i0 | stride;
            // SAFETY: (i0, i1) pairs are disjoint across k and in bounds.
            unsafe { f.update(&mut *p.add(i0 as usize), &mut *p.add(i1 as usize)) };
        }
    });
    Ok(())
}

/// Control bits set to `ctrl_values` (all ones when `None`), as an index mask.
fn control_pattern(ctrls: &[usize], ctrl_values: Option<&[bool]>, n_qubits: usize) -> Result<u64> {
    if let Some(v) = ctrl_values {
        if v.len() != ctrls.len() {
            return Err(SimError::DimensionMismatch {
                expected: ctrls.len(),
                got: v.len(),
            });
        }
    }
    Ok(ctrls
        .iter()
        .enumerate()
        .filter(|&(i, _)| ctrl_values.is_none_or(|v| v[i]))
        .fold(0u64, |acc, (_, &c)| acc | (1u64 << offset_of(c, n_qubits))))
}

pub fn apply_controlled_single_qubit<T, F>(
    amps: &mut [Complex<T>],
    ctrls: &[usize],
    ctrl_values: Option<&[bool]>,
    q: usize,
    f: &F,
    threads: usize,
) -> Result<()>
where
    T: Real,
    F: CoefficientInteraction<T> + ?Sized,
{
    let n_qubits = qubits_of(amps.len());
    let mut all = ctrls.to_vec();
    all.push(q);
    check_wires(&all, n_qubits)?;
    if ctrls.is_empty() {
        return apply_single_qubit(amps, q, f, threads);
    }
    let stride = 1u64 << offset_of(q, n_qubits);
    let ctrl_bits = control_pattern(ctrls, ctrl_values, n_qubits)?;
    let offsets: Vec<usize> = all.iter().map(|&w| offset_of(w, n_qubits)).collect();
    let masks = get_masks(&offsets, n_qubits)?;
    let trips = 1usize << (n_qubits - 1 - ctrls.len());
    let ptr = SendPtr(amps.as_mut_ptr());
    for_each_range(trips, threads, |start, end| {
        let p = ptr.get();
        for k in start as u64..end as u64 {
            let i0 = masks.expand(k) | ctrl_bits;
            let i1 = i0 | stride;
            // SAFETY: distinct k expand to distinct i0; i1 differs only in the target bit.
            unsafe { f.update(&mut *p.add(i0 as usize), &mut *p.add(i1 as usize)) };
        }
    });
    Ok(())
}

/// Which code path `apply_matrix` takes for a gate on `w` wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixPath {
    Specialized(usize),
    General,
}

pub fn matrix_path(n_wires: usize) -> MatrixPath {
    match n_wires {
        1..=4 => MatrixPath::Specialized(n_wires),
        _ => MatrixPath::General,
    }
}

/// Applies `matrix` to `wires` (wire 0 of the list is the matrix's most
/// significant index bit), restricted to the subspace where `ctrls` equal
/// `ctrl_values`. Unitarity is not checked.
pub fn apply_controlled_matrix<T: Real>(
    amps: &mut [Complex<T>],
    ctrls: &[usize],
    ctrl_values: Option<&[bool]>,
    wires: &[usize],
    matrix: &Matrix<T>,
    threads: usize,
) -> Result<()> {
    let n_qubits = qubits_of(amps.len());
    if wires.is_empty() {
        return Err(SimError::invalid("matrix gate needs at least one wire"));
    }
    let expected = 1usize
        .checked_shl(wires.len() as u32)
        .filter(|_| wires.len() < usize::BITS as usize)
        .ok_or_else(|| SimError::invalid("too many matrix wires"))?;
    if matrix.dim() != expected {
        return Err(SimError::DimensionMismatch {
            expected,
            got: matrix.dim(),
        });
    }
    let mut all = ctrls.to_vec();
    all.extend_from_slice(wires);
    check_wires(&all, n_qubits)?;

    let ctrl_bits = control_pattern(ctrls, ctrl_values, n_qubits)?;
    let offsets: Vec<usize> = all.iter().map(|&w| offset_of(w, n_qubits)).collect();
    let masks = get_masks(&offsets, n_qubits)?;
    let w = wires.len();
    let sub_offsets: Vec<u64> = (0..expected)
        .map(|r| {
            (0..w)
                .filter(|j| (r >> (w - 1 - j)) & 1 == 1)
                .fold(0u64, |acc, j| acc | (1u64 << offset_of(wires[j], n_qubits)))
        })
        .collect();
    let trips = masks.free_count() as usize;
    let ctx = MatrixLoop {
        masks: &masks,
        ctrl_bits,
        sub_offsets: &sub_offsets,
        matrix: matrix.as_slice(),
    };

    match matrix_path(w) {
        MatrixPath::Specialized(1) => ctx.run::<2>(amps, trips, threads),
        MatrixPath::Specialized(2) => ctx.run::<4>(amps, trips, threads),
        MatrixPath::Specialized(3) => ctx.run::<8>(amps, trips, threads),
        MatrixPath::Specialized(4) => ctx.run::<16>(amps, trips, threads),
        _ => ctx.run_general(amps, trips, threads),
    }
    Ok(())
}

pub fn apply_matrix<T: Real>(
    amps: &mut [Complex<T>],
    wires: &[usize],
    matrix: &Matrix<T>,
    threads: usize,
) -> Result<()> {
    apply_controlled_matrix(amps, &[], None, wires, matrix, threads)
}

struct MatrixLoop<'a, T> {
    masks: &'a MaskSet,
    ctrl_bits: u64,
    sub_offsets: &'a [u64],
    matrix: &'a [Complex<T>],
}

impl<T: Real> MatrixLoop<'_, T> {
    fn run<const DIM: usize>(&self, amps: &mut [Complex<T>], trips: usize, threads: usize) {
        let zero = Complex::new(T::zero(), T::zero());
        let ptr = SendPtr(amps.as_mut_ptr());
        for_each_range(trips, threads, |start, end| {
            let p = ptr.get();
            let mut idx = [0usize; DIM];
            let mut v = [zero; DIM];
            for k in start as u64..end as u64 {
                let base = self.masks.expand(k) | self.ctrl_bits;
                for (r, (i, x)) in idx.iter_mut().zip(v.iter_mut()).enumerate() {
                    *i = (base | self.sub_offsets[r]) as usize;
                    // SAFETY: index sets for distinct k are disjoint and in bounds.
                    *x = unsafe { *p.add(*i) };
                }
                for (r, &i) in idx.iter().enumerate() {
                    let row = &self.matrix[r * DIM..(r + 1) * DIM];
                    let mut acc = zero;
                    for c in 0..DIM {
                        acc = acc + row[c] * v[c];
                    }
                    // SAFETY: as above.
                    unsafe { *p.add(i) = acc };
                }
            }
        });
    }

    fn run_general(&self, amps: &mut [Complex<T>], trips: usize, threads: usize) {
        let dim = self.sub_offsets.len();
        let zero = Complex::new(T::zero(), T::zero());
        let ptr = SendPtr(amps.as_mut_ptr());
        for_each_range(trips, threads, |start, end| {
            let p = ptr.get();
            let mut idx = vec![0usize; dim];
            let mut v = vec![zero; dim];
            for k in start as u64..end as u64 {
                let base = self.masks.expand(k) | self.ctrl_bits;
                for (r, (i, x)) in idx.iter_mut().zip(v.iter_mut()).enumerate() {
                    *i = (base | self.sub_offsets[r]) as usize;
                    // SAFETY: index sets for distinct k are disjoint and in bounds.
                    *x = unsafe { *p.add(*i) };
                }
                for (r, &i) in idx.iter().enumerate() {
                    let row = &self.matrix[r * dim..(r + 1) * dim];
                    let acc = row.iter().zip(&v).fold(zero, |acc, (&m, &x)| acc + m * x);
                    // SAFETY: as above.
                    unsafe { *p.add(i) = acc };
                }
            }
        });
    }
}
