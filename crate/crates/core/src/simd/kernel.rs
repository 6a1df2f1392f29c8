//! The generic register kernel.
//!
//! A gate on wires `W` with matrix `M` is split by interaction class. Inter
//! wires select one of `REGS` registers in a group; intra wires are lanes
//! within a register and are reached by `PERMS` xor-permutations. Every
//! output register is then
//!
//! ```text
//! out[r] = Σ_{r', p} coef[r][r'][p] ⊙ permute(v[r'], p)
//! ```
//!
//! with `coef[r][r'][p][l] = M[row(r, l)][col(r', l ^ p)]`.

use num_complex::{Complex, Complex64};

use super::vector::ComplexVector;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::parallel::{for_each_range, SendPtr};
use crate::statevector::{get_masks, MaskSet};

/// Precomputed layout for one gate application.
pub(crate) struct Plan {
    lanes: usize,
    /// Spreads a group counter over register indices with the inter bits cleared.
    masks: MaskSet,
    /// Amplitude offset of each register in a group.
    reg_offsets: Vec<usize>,
    /// Lane xor-mask of each permutation.
    perms: Vec<usize>,
    /// `coefs[((r * REGS + r2) * PERMS + p) * lanes + l]`.
    coefs: Vec<Complex64>,
}

impl Plan {
    /// `wires[0]` is the most significant bit of the matrix index. Requires
    /// `lanes <= 2^n_qubits`.
    pub(crate) fn new(
        n_qubits: usize,
        wires: &[usize],
        matrix: &Matrix,
        lanes: usize,
    ) -> Result<Plan> {
        let k = wires.len();
        let lane_bits = lanes.trailing_zeros() as usize;
        let strides: Vec<usize> = wires
            .iter()
            .map(|&w| 1usize << (n_qubits - 1 - w))
            .collect();
        // (position of the wire in the matrix index, stride)
        let inter: Vec<(usize, usize)> = (0..k)
            .filter(|&j| strides[j] >= lanes)
            .map(|j| (j, strides[j]))
            .collect();
        let intra: Vec<(usize, usize)> = (0..k)
            .filter(|&j| strides[j] < lanes)
            .map(|j| (j, strides[j]))
            .collect();
        let regs = 1usize << inter.len();
        let perms_n = 1usize << intra.len();

        let offsets: Vec<usize> = inter
            .iter()
            .map(|&(_, s)| s.trailing_zeros() as usize - lane_bits)
            .collect();
        let masks = get_masks(&offsets, n_qubits - lane_bits)?;

        let spread = |bits: usize, set: &[(usize, usize)]| -> usize {
            set.iter()
                .enumerate()
                .filter(|&(e, _)| bits >> e & 1 == 1)
                .map(|(_, &(_, s))| s)
                .sum()
        };
        let reg_offsets: Vec<usize> = (0..regs).map(|r| spread(r, &inter)).collect();
        let perms: Vec<usize> = (0..perms_n).map(|t| spread(t, &intra)).collect();

        // Matrix index of (register selector, lane).
        let index = |r: usize, lane: usize| -> usize {
            let mut idx = 0;
            for (e, &(j, _)) in inter.iter().enumerate() {
                idx |= (r >> e & 1) << (k - 1 - j);
            }
            for &(j, s) in &intra {
                idx |= usize::from(lane & s != 0) << (k - 1 - j);
            }
            idx
        };

        let mut coefs = Vec::with_capacity(regs * regs * perms_n * lanes);
        for r in 0..regs {
            for r2 in 0..regs {
                for &p in &perms {
                    for l in 0..lanes {
                        coefs.push(matrix[(index(r, l), index(r2, l ^ p))]);
                    }
                }
            }
        }
        Ok(Plan {
            lanes,
            masks,
            reg_offsets,
            perms,
            coefs,
        })
    }

    pub(crate) fn shape(&self) -> (usize, usize) {
        (self.reg_offsets.len(), self.perms.len())
    }

    fn groups(&self) -> usize {
        self.masks.free_count() as usize
    }
}

/// # Safety
/// `ptr` addresses `2^n_qubits` amplitudes for the plan's register size,
/// `V::LANES == plan.lanes`, and `[start, end)` lies within the group range.
/// With `streaming`, `ptr` must be aligned to the register width.
#[inline(always)]
unsafe fn run<V: ComplexVector, const R: usize, const P: usize>(
    ptr: *mut Complex<V::Scalar>,
    plan: &Plan,
    streaming: bool,
    start: usize,
    end: usize,
) {
    debug_assert_eq!(V::LANES, plan.lanes);
    debug_assert_eq!((R, P), plan.shape());
    let coefs: Vec<V::Coef> = plan.coefs.chunks_exact(V::LANES).map(V::prepare).collect();
    let off: [usize; R] = std::array::from_fn(|r| plan.reg_offsets[r]);
    let perm: [usize; P] = std::array::from_fn(|t| plan.perms[t]);

    for g in start..end {
        let base = plan.masks.expand(g as u64) as usize * V::LANES;
        let pv: [[V; P]; R] = std::array::from_fn(|r| {
            let v = V::load(ptr.add(base + off[r]));
            std::array::from_fn(|t| v.xor_permute(perm[t]))
        });
        for r in 0..R {
            let mut acc = V::zero();
            for (r2, row) in pv.iter().enumerate() {
                for (t, &v) in row.iter().enumerate() {
                    acc = V::mul_add(acc, &coefs[(r * R + r2) * P + t], v);
                }
            }
            let dst = ptr.add(base + off[r]);
            if streaming {
                acc.stream(dst);
            } else {
                acc.store(dst);
            }
        }
    }
    if streaming {
        V::fence();
    }
}

type Runner<S> = unsafe fn(*mut Complex<S>, &Plan, bool, usize, usize);

/// Kernel shape to monomorphized loop.
fn select<V: ComplexVector>(shape: (usize, usize)) -> Runner<V::Scalar> {
    match shape {
        (1, 2) => run::<V, 1, 2>,
        (2, 1) => run::<V, 2, 1>,
        (1, 4) => run::<V, 1, 4>,
        (2, 2) => run::<V, 2, 2>,
        (4, 1) => run::<V, 4, 1>,
        other => unreachable!("no kernel for shape {other:?}"),
    }
}

/// Runs the plan over `amps` with a portable or already feature-checked
/// vector type.
///
/// # Safety
/// `V` must be executable on this CPU and `V::LANES == plan.lanes`.
unsafe fn drive<V: ComplexVector>(
    amps: &mut [Complex<V::Scalar>],
    plan: &Plan,
    streaming: bool,
    threads: usize,
    runner: Runner<V::Scalar>,
) {
    let ptr = SendPtr(amps.as_mut_ptr());
    for_each_range(plan.groups(), threads, |s, e| {
        // SAFETY: groups are disjoint, so ranges write disjoint registers.
        unsafe { runner(ptr.get(), plan, streaming, s, e) }
    });
}

pub(crate) fn run_portable<V: ComplexVector>(
    amps: &mut [Complex<V::Scalar>],
    plan: &Plan,
    threads: usize,
) {
    // SAFETY: portable vectors use no CPU extensions; streaming is a plain store.
    unsafe { drive::<V>(amps, plan, false, threads, select::<V>(plan.shape())) }
}

#[cfg(target_arch = "x86_64")]
pub(crate) mod native {
    use super::*;
    use crate::simd::x86::{Avx2F64, Avx512F64};

    macro_rules! entry {
        ($name:ident, $v:ty, $features:literal) => {
            #[target_feature(enable = $features)]
            unsafe fn $name<const R: usize, const P: usize>(
                ptr: *mut Complex<f64>,
                plan: &Plan,
                streaming: bool,
                start: usize,
                end: usize,
            ) {
                run::<$v, R, P>(ptr, plan, streaming, start, end)
            }
        };
    }

    entry!(avx2_entry, Avx2F64, "avx2,fma");
    entry!(avx512_entry, Avx512F64, "avx512f,avx2,fma");

    macro_rules! table {
        ($entry:ident, $shape:expr) => {
            match $shape {
                (1, 2) => $entry::<1, 2> as Runner<f64>,
                (2, 1) => $entry::<2, 1>,
                (1, 4) => $entry::<1, 4>,
                (2, 2) => $entry::<2, 2>,
                (4, 1) => $entry::<4, 1>,
                other => unreachable!("no kernel for shape {other:?}"),
            }
        };
    }

    /// Whether streaming stores can be used on this buffer.
    fn aligned(amps: &[Complex<f64>], bytes: usize) -> bool {
        (amps.as_ptr() as usize).is_multiple_of(bytes)
    }

    /// # Safety
    /// The CPU must support AVX2 and FMA.
    pub(crate) unsafe fn run_avx2(
        amps: &mut [Complex<f64>],
        plan: &Plan,
        streaming: bool,
        threads: usize,
    ) {
        let streaming = streaming && aligned(amps, 32);
        drive::<Avx2F64>(
            amps,
            plan,
            streaming,
            threads,
            table!(avx2_entry, plan.shape()),
        )
    }

    /// # Safety
    /// The CPU must support AVX-512F, AVX2 and FMA.
    pub(crate) unsafe fn run_avx512(
        amps: &mut [Complex<f64>],
        plan: &Plan,
        streaming: bool,
        threads: usize,
    ) {
        let streaming = streaming && aligned(amps, 64);
        drive::<Avx512F64>(
            amps,
            plan,
            streaming,
            threads,
            table!(avx512_entry, plan.shape()),
        )
    }
}
