//! AVX2 and AVX-512 instantiations for `f64` amplitudes.
//!
//! A complex value occupies two adjacent doubles. Products use the
//! duplicate-real / duplicate-imaginary split with `fmaddsub`:
//! `(a + ib)(c + id)` = `fmaddsub(v, re(c), swap(v) · im(c))`.
//!
//! Every method is `#[inline(always)]` and is only reached through the
//! `#[target_feature]` entry points in `kernel.rs`.

#![allow(unsafe_op_in_unsafe_fn)]

use std::arch::x86_64::*;

use num_complex::{Complex, Complex64};

use super::vector::ComplexVector;

#[derive(Clone, Copy)]
pub struct Avx2F64(__m256d);

#[derive(Clone, Copy)]
pub struct Avx2Coef {
    re: __m256d,
    im: __m256d,
}

impl ComplexVector for Avx2F64 {
    type Scalar = f64;
    type Coef = Avx2Coef;
    const LANES: usize = 2;

    #[inline(always)]
    fn zero() -> Self {
        // SAFETY: AVX is implied by every caller's target features.
        Avx2F64(unsafe { _mm256_setzero_pd() })
    }

    #[inline(always)]
    fn prepare(c: &[Complex64]) -> Avx2Coef {
        // SAFETY: as above.
        unsafe {
            Avx2Coef {
                re: _mm256_setr_pd(c[0].re, c[0].re, c[1].re, c[1].re),
                im: _mm256_setr_pd(c[0].im, c[0].im, c[1].im, c[1].im),
            }
        }
    }

    #[inline(always)]
    fn mul_add(acc: Self, c: &Avx2Coef, v: Self) -> Self {
        // SAFETY: as above; FMA is part of the Vector256 requirement.
        unsafe {
            let swapped = _mm256_permute_pd(v.0, 0b0101);
            let prod = _mm256_fmaddsub_pd(v.0, c.re, _mm256_mul_pd(swapped, c.im));
            Avx2F64(_mm256_add_pd(acc.0, prod))
        }
    }

    #[inline(always)]
    fn xor_permute(self, mask: usize) -> Self {
        match mask {
            0 => self,
            // SAFETY: as above.
            _ => Avx2F64(unsafe { _mm256_permute2f128_pd(self.0, self.0, 1) }),
        }
    }

    #[inline(always)]
    unsafe fn load(ptr: *const Complex<f64>) -> Self {
        Avx2F64(_mm256_loadu_pd(ptr as *const f64))
    }

    #[inline(always)]
    unsafe fn store(self, ptr: *mut Complex<f64>) {
        _mm256_storeu_pd(ptr as *mut f64, self.0)
    }

    #[inline(always)]
    unsafe fn stream(self, ptr: *mut Complex<f64>) {
        _mm256_stream_pd(ptr as *mut f64, self.0)
    }

    #[inline(always)]
    fn fence() {
        // SAFETY: SSE is baseline on x86_64.
        unsafe { _mm_sfence() }
    }
}

#[derive(Clone, Copy)]
pub struct Avx512F64(__m512d);

#[derive(Clone, Copy)]
pub struct Avx512Coef {
    re: __m512d,
    im: __m512d,
}

impl ComplexVector for Avx512F64 {
    type Scalar = f64;
    type Coef = Avx512Coef;
    const LANES: usize = 4;

    #[inline(always)]
    fn zero() -> Self {
        // SAFETY: AVX-512F is implied by every caller's target features.
        Avx512F64(unsafe { _mm512_setzero_pd() })
    }

    #[inline(always)]
    fn prepare(c: &[Complex64]) -> Avx512Coef {
        // SAFETY: as above.
        unsafe {
            Avx512Coef {
                re: _mm512_setr_pd(
                    c[0].re, c[0].re, c[1].re, c[1].re, c[2].re, c[2].re, c[3].re, c[3].re,
                ),
                im: _mm512_setr_pd(
                    c[0].im, c[0].im, c[1].im, c[1].im, c[2].im, c[2].im, c[3].im, c[3].im,
                ),
            }
        }
    }

    #[inline(always)]
    fn mul_add(acc: Self, c: &Avx512Coef, v: Self) -> Self {
        // SAFETY: as above.
        unsafe {
            let swapped = _mm512_permute_pd(v.0, 0b0101_0101);
            let prod = _mm512_fmaddsub_pd(v.0, c.re, _mm512_mul_pd(swapped, c.im));
            Avx512F64(_mm512_add_pd(acc.0, prod))
        }
    }

    #[inline(always)]
    fn xor_permute(self, mask: usize) -> Self {
        let v = self.0;
        // SAFETY: as above. Each immediate picks 128-bit chunks, i.e. whole
        // complex values: 0xB1 = [1,0,3,2], 0x4E = [2,3,0,1], 0x1B = [3,2,1,0].
        unsafe {
            Avx512F64(match mask {
                0 => v,
                1 => _mm512_shuffle_f64x2(v, v, 0xB1),
                2 => _mm512_shuffle_f64x2(v, v, 0x4E),
                _ => _mm512_shuffle_f64x2(v, v, 0x1B),
            })
        }
    }

    #[inline(always)]
    unsafe fn load(ptr: *const Complex<f64>) -> Self {
        Avx512F64(_mm512_loadu_pd(ptr as *const f64))
    }

    #[inline(always)]
    unsafe fn store(self, ptr: *mut Complex<f64>) {
        _mm512_storeu_pd(ptr as *mut f64, self.0)
    }

    #[inline(always)]
    unsafe fn stream(self, ptr: *mut Complex<f64>) {
        _mm512_stream_pd(ptr as *mut f64, self.0)
    }

    #[inline(always)]
    fn fence() {
        // SAFETY: SSE is baseline on x86_64.
        unsafe { _mm_sfence() }
    }
}
