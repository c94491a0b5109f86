//! Unitary DFT applied blockwise to antenna-major buffers.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::scalar::{from_usize, Real, C};

/// Cached forward/inverse FFT plans of length `K` with `1/sqrt(K)` scaling on
/// both directions, so that each transform preserves Euclidean norm.
///
/// Buffers are interpreted as consecutive length-`K` blocks, one per antenna.
#[derive(Clone)]
pub struct UnitaryDft<T: Real> {
    len: usize,
    scale: T,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for UnitaryDft<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryDft")
            .field("len", &self.len)
            .finish()
    }
}

impl<T: Real> UnitaryDft<T> {
    /// # Panics
    /// Panics if `len == 0`.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "transform length must be positive");
        let mut planner = FftPlanner::new();
        Self {
            len,
            scale: T::one() / from_usize::<T>(len).sqrt(),
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place inverse transform `x[n] = K^{-1/2} sum_k X[k] e^{+2 pi i k n / K}`
    /// of every block.
    ///
    /// # Panics
    /// Panics if the buffer length is not a multiple of the block length.
    pub fn inverse_blocks(&self, buf: &mut [C<T>]) {
        assert_eq!(
            buf.len() % self.len,
            0,
            "buffer is not a whole number of blocks"
        );
        if buf.is_empty() {
            return;
        }
        self.inverse.process(buf);
        self.rescale(buf);
    }

    /// In-place forward transform, the adjoint (and inverse) of
    /// [`inverse_blocks`](Self::inverse_blocks).
    pub fn forward_blocks(&self, buf: &mut [C<T>]) {
        assert_eq!(
            buf.len() % self.len,
            0,
            "buffer is not a whole number of blocks"
        );
        if buf.is_empty() {
            return;
        }
        self.forward.process(buf);
        self.rescale(buf);
    }

    fn rescale(&self, buf: &mut [C<T>]) {
        for z in buf {
            *z = *z * self.scale;
        }
    }
}
