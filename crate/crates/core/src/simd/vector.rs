//! Fixed-width complex vector interface used by the wide kernels.

use num_complex::{Complex, Complex64};

use crate::precision::Real;

/// `LANES` complex values held in one register.
///
/// Lane `l` of a loaded vector is the amplitude at `base + l`. Coefficients
/// are prepared once per gate application in whatever layout the
/// implementation multiplies fastest.
pub trait ComplexVector: Copy {
    type Scalar: Real;
    type Coef: Copy;
    const LANES: usize;

    fn zero() -> Self;

    /// Converts `LANES` per-lane coefficients.
    fn prepare(coef: &[Complex64]) -> Self::Coef;

    /// `acc + coef ⊙ v`, lane by lane.
    fn mul_add(acc: Self, coef: &Self::Coef, v: Self) -> Self;

    /// Lane `l` of the result is lane `l ^ mask` of `self`.
    fn xor_permute(self, mask: usize) -> Self;

    /// # Safety
    /// `ptr` must be valid for reading `LANES` values.
    unsafe fn load(ptr: *const Complex<Self::Scalar>) -> Self;

    /// # Safety
    /// `ptr` must be valid for writing `LANES` values.
    unsafe fn store(self, ptr: *mut Complex<Self::Scalar>);

    /// Non-temporal store. Falls back to [`ComplexVector::store`] where the
    /// implementation has no such instruction.
    ///
    /// # Safety
    /// As [`ComplexVector::store`]; native implementations also need `ptr`
    /// aligned to the register width.
    unsafe fn stream(self, ptr: *mut Complex<Self::Scalar>) {
        self.store(ptr)
    }

    /// Orders earlier streaming stores before later stores.
    fn fence() {}
}

/// Plain-array instantiation. Works for any lane count and precision and
/// carries the reference semantics for the native implementations.
#[derive(Clone, Copy, Debug)]
pub struct Portable<T, const C: usize>(pub [Complex<T>; C]);

impl<T: Real, const C: usize> ComplexVector for Portable<T, C> {
    type Scalar = T;
    type Coef = [Complex<T>; C];
    const LANES: usize = C;

    #[inline(always)]
    fn zero() -> Self {
        Portable([Complex::new(T::zero(), T::zero()); C])
    }

    fn prepare(coef: &[Complex64]) -> Self::Coef {
        std::array::from_fn(|l| Complex::new(T::from_f64(coef[l].re), T::from_f64(coef[l].im)))
    }

    #[inline(always)]
    fn mul_add(acc: Self, coef: &Self::Coef, v: Self) -> Self {
        Portable(std::array::from_fn(|l| acc.0[l] + coef[l] * v.0[l]))
    }

    #[inline(always)]
    fn xor_permute(self, mask: usize) -> Self {
        Portable(std::array::from_fn(|l| self.0[l ^ mask]))
    }

    #[inline(always)]
    unsafe fn load(ptr: *const Complex<T>) -> Self {
        Portable(std::ptr::read(ptr as *const [Complex<T>; C]))
    }

    #[inline(always)]
    unsafe fn store(self, ptr: *mut Complex<T>) {
        std::ptr::write(ptr as *mut [Complex<T>; C], self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn portable_permute_and_fma() {
        let v = Portable::<f64, 4>(std::array::from_fn(|l| Complex::new(l as f64, 0.0)));
        let p = v.xor_permute(3);
        assert_eq!(p.0.map(|c| c.re), [3.0, 2.0, 1.0, 0.0]);
        let c = Portable::<f64, 4>::prepare(&[Complex64::i(); 4]);
        let r = Portable::mul_add(Portable::zero(), &c, v);
        assert_eq!(r.0[2], Complex::new(0.0, 2.0));
    }
}
