//! Cache-line aligned amplitude storage.
//!
//! Vector kernels load whole registers starting at multiples of the lane
//! capacity, and streaming stores require register-width alignment, so state
//! buffers are allocated at 64-byte alignment.

use std::alloc::{self, Layout};
use std::ops::{Deref, DerefMut};
use std::ptr::NonNull;

use num_complex::Complex;

use crate::precision::Real;

pub const ALIGNMENT: usize = 64;

pub struct AlignedBuf<T: Real> {
    ptr: NonNull<Complex<T>>,
    len: usize,
}

// SAFETY: the buffer uniquely owns its allocation, like a Vec.
unsafe impl<T: Real> Send for AlignedBuf<T> {}
// SAFETY: shared access only hands out shared slices.
unsafe impl<T: Real> Sync for AlignedBuf<T> {}

impl<T: Real> AlignedBuf<T> {
    fn layout(len: usize) -> Option<Layout> {
        let bytes = len.checked_mul(std::mem::size_of::<Complex<T>>())?;
        Layout::from_size_align(bytes, ALIGNMENT).ok()
    }

    /// Allocates `len` zeroed amplitudes. Returns `None` when the size overflows
    /// or the allocator refuses.
    pub fn zeroed(len: usize) -> Option<Self> {
        assert!(len > 0, "empty amplitude buffer");
        let layout = Self::layout(len)?;
        // SAFETY: layout has nonzero size; all-zero bits are a valid Complex<f32|f64>.
        let raw = unsafe { alloc::alloc_zeroed(layout) };
        let ptr = NonNull::new(raw.cast::<Complex<T>>())?;
        Some(AlignedBuf { ptr, len })
    }

    pub fn from_slice(src: &[Complex<T>]) -> Option<Self> {
        let mut buf = Self::zeroed(src.len())?;
        buf.copy_from_slice(src);
        Some(buf)
    }
}

impl<T: Real> Deref for AlignedBuf<T> {
    type Target = [Complex<T>];

    #[inline]
    fn deref(&self) -> &[Complex<T>] {
        // SAFETY: ptr is valid for len initialized elements for the buffer's lifetime.
        unsafe { std::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }
    }
}

impl<T: Real> DerefMut for AlignedBuf<T> {
    #[inline]
    fn deref_mut(&mut self) -> &mut [Complex<T>] {
        // SAFETY: unique access through &mut self.
        unsafe { std::slice::from_raw_parts_mut(self.ptr.as_ptr(), self.len) }
    }
}

impl<T: Real> Clone for AlignedBuf<T> {
    fn clone(&self) -> Self {
        Self::from_slice(self).expect("allocation failed while cloning state")
    }
}

impl<T: Real> Drop for AlignedBuf<T> {
    fn drop(&mut self) {
        let layout = Self::layout(self.len).expect("layout was valid at allocation");
        // SAFETY: allocated with this exact layout in `zeroed`.
        unsafe { alloc::dealloc(self.ptr.as_ptr().cast(), layout) }
    }
}

impl<T: Real> std::fmt::Debug for AlignedBuf<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buffers_are_register_aligned() {
        for len in [1usize, 2, 3, 8, 1024] {
            let b = AlignedBuf::<f64>::zeroed(len).unwrap();
            assert_eq!(b.as_ptr() as usize % ALIGNMENT, 0);
            assert!(b.iter().all(|c| c.re == 0.0 && c.im == 0.0));
        }
    }

    #[test]
    fn absurd_sizes_fail_instead_of_aborting() {
        assert!(AlignedBuf::<f64>::zeroed(usize::MAX / 8).is_none());
    }
}
