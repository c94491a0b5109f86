//! Small dense complex linear algebra.
//!
//! The matrices handled per subcarrier are tiny (at most a few dozen rows or
//! columns), so a column-major `Vec` with a one-sided Jacobi SVD is both
//! accurate and fast enough. The real Cholesky routines at the bottom serve the
//! interior-point normal equations.

use std::ops::{Index, IndexMut};

use num_traits::Float;

use crate::scalar::{czero, from_usize, lit, Real, C};

/// Relative rank tolerance: singular values below `RANK_TOL * sigma_max`
/// count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Rank tolerance for precision `T`: `RANK_TOL`, widened to a small multiple of
/// the machine epsilon for types coarser than `f64`.
pub fn rank_tol<T: Real>() -> T {
    lit::<T>(RANK_TOL).max(T::epsilon() * lit(1e3))
}

/// Dense complex matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from column-major data.
    ///
    /// # Panics
    /// Panics if `data.len() != rows * cols`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major buffer size");
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn from_col(v: &[C<T>]) -> Self {
        Self::from_col_major(v.len(), 1, v.to_vec())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Column-major storage.
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C<T>] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, a: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * a).collect(),
        }
    }

    pub fn scale_real(&self, a: T) -> Self {
        self.scale(C::new(a, T::zero()))
    }

    /// Matrix product `self * rhs`.
    ///
    /// # Panics
    /// Panics on an inner-dimension mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let oc = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (l, &b) in rhs.col(j).iter().enumerate() {
                if b == czero() {
                    continue;
                }
                for (o, &a) in oc.iter_mut().zip(self.col(l)) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// Product `self^H * rhs` without forming the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "row counts differ");
        Self::from_fn(self.cols, rhs.cols, |i, j| {
            self.col(i)
                .iter()
                .zip(rhs.col(j))
                .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
        })
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, x.len(), "vector length");
        let mut out = vec![czero(); self.rows];
        for (l, &b) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.col(l)) {
                *o = *o + a * b;
            }
        }
        out
    }

    /// `self^H x`.
    pub fn adjoint_mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.rows, x.len(), "vector length");
        (0..self.cols)
            .map(|j| {
                self.col(j)
                    .iter()
                    .zip(x)
                    .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
            })
            .collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shapes differ");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shapes differ");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols, "column range");
        Self::from_col_major(
            self.rows,
            end - start,
            self.data[start * self.rows..end * self.rows].to_vec(),
        )
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows, "row range");
        Self::from_fn(end - start, self.cols, |i, j| self[(start + i, j)])
    }

    /// Horizontal concatenation. All blocks must share the row count.
    pub fn hstack(blocks: &[&Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut data = Vec::new();
        let mut cols = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            data.extend_from_slice(&b.data);
            cols += b.cols;
        }
        Self { rows, cols, data }
    }

    /// Vertical concatenation. All blocks must share the column count.
    pub fn vstack(blocks: &[&Self]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
        }
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for b in blocks {
                data.extend_from_slice(b.col(j));
            }
        }
        Self { rows, cols, data }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// Singular value decomposition `A = U diag(s) V^H`.
///
/// For an `m x n` input, `s` has length `n` in descending order and `v` is a
/// full `n x n` unitary matrix, so the trailing columns of `v` span the kernel.
/// `u` is `m x min(m, n)`; a column whose singular value is numerically zero is
/// left as zero because its direction is not determined by `A`.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: CMat<T>,
    pub s: Vec<T>,
    pub v: CMat<T>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `rel_tol * s_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let smax = self.s.first().copied().unwrap_or_else(T::zero);
        if smax <= T::zero() {
            return 0;
        }
        self.s.iter().filter(|&&s| s > rel_tol * smax).count()
    }
}

const MAX_SWEEPS: usize = 60;

/// One-sided (Hestenes) Jacobi SVD of a complex matrix.
pub fn svd<T: Real>(a: &CMat<T>) -> Svd<T> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = CMat::identity(n);
    let eps = T::epsilon();
    let fro = a.frobenius_norm();
    let tiny = (eps * fro) * (eps * fro);
    let tol = from_usize::<T>(m.max(1)) * eps;

    if fro > T::zero() {
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let (alpha, beta, g) = {
                        let ci = w.col(i);
                        let cj = w.col(j);
                        let mut alpha = T::zero();
                        let mut beta = T::zero();
                        let mut g = czero::<T>();
                        for (x, y) in ci.iter().zip(cj) {
                            alpha = alpha + x.norm_sqr();
                            beta = beta + y.norm_sqr();
                            g = g + x.conj() * y;
                        }
                        (alpha, beta, g)
                    };
                    if alpha <= tiny || beta <= tiny {
                        continue;
                    }
                    let gabs = g.norm();
                    if gabs <= tol * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = (g / gabs).conj();
                    let zeta = (beta - alpha) / (lit::<T>(2.0) * gabs);
                    let sgn = if zeta >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    let t = sgn / (Float::abs(zeta) + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    rotate_cols(&mut w, i, j, phase, c, s);
                    rotate_cols(&mut v, i, j, phase, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let norms: Vec<T> = (0..n)
        .map(|j| w.col(j).iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        norms[y]
            .partial_cmp(&norms[x])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let s: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let p = m.min(n);
    let smax = s.first().copied().unwrap_or_else(T::zero);
    let u_floor = eps * from_usize::<T>(m.max(n).max(1)) * smax;
    let mut u = CMat::zeros(m, p);
    for (dst, &src) in order.iter().take(p).enumerate() {
        if norms[src] > u_floor && norms[src] > T::zero() {
            let inv = T::one() / norms[src];
            for (o, z) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = z * inv;
            }
        }
    }
    let mut vs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vs.col_mut(dst).copy_from_slice(v.col(src));
    }
    Svd { u, s, v: vs }
}

/// Applies the rotation `[a_i, a_j e^{-i phi}] <- [c a_i - s a~_j, s a_i + c a~_j]`.
fn rotate_cols<T: Real>(m: &mut CMat<T>, i: usize, j: usize, phase: C<T>, c: T, s: T) {
    let rows = m.rows;
    let (lo, hi) = m.data.split_at_mut(j * rows);
    let ci = &mut lo[i * rows..(i + 1) * rows];
    let cj = &mut hi[..rows];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let a = *x;
        let b = *y * phase;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// Orthonormal basis of the kernel of `a`.
///
/// Singular values at or below `rank_tol * sigma_max` count as zero. Kernel
/// vectors are returned in ascending order of their singular value; since all
/// of them are treated as exactly zero, ties resolve by column position in the
/// decomposition, which is deterministic for a given input.
pub fn null_space_basis<T: Real>(a: &CMat<T>, rank_tol: T) -> CMat<T> {
    let n = a.cols();
    if a.rows() == 0 {
        return CMat::identity(n);
    }
    let dec = svd(a);
    let r = dec.rank(rank_tol);
    dec.v.columns(r, n)
}

/// In-place Cholesky factorization of a symmetric positive-definite matrix
/// stored row-major in `a` (`n x n`). On success the lower triangle holds `L`
/// with `A = L L^T`; the strict upper triangle is left untouched.
///
/// Returns the index of the first non-positive pivot on failure.
pub fn cholesky_in_place<T: Real>(a: &mut [T], n: usize) -> Result<(), usize> {
    assert_eq!(a.len(), n * n, "cholesky buffer size");
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - a[j * n + k] * a[j * n + k];
        }
        if d <= T::zero() || !d.is_finite() {
            return Err(j);
        }
        let ljj = d.sqrt();
        a[j * n + j] = ljj;
        for i in (j + 1)..n {
            let (top, bottom) = a.split_at_mut(i * n);
            let lj = &top[j * n..j * n + j];
            let row_i = &mut bottom[..n];
            let mut s = row_i[j];
            for (x, y) in row_i[..j].iter().zip(lj) {
                s = s - *x * *y;
            }
            row_i[j] = s / ljj;
        }
    }
    Ok(())
}

/// Solves `L L^T x = b` in place given the factor from [`cholesky_in_place`].
pub fn cholesky_solve<T: Real>(l: &[T], n: usize, b: &mut [T]) {
    assert_eq!(b.len(), n, "rhs length");
    for i in 0..n {
        let row = &l[i * n..i * n + i];
        let mut s = b[i];
        for (lk, xk) in row.iter().zip(b.iter()) {
            s = s - *lk * *xk;
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s = s - l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat<f64> {
        CMat::from_fn(rows, cols, |_, _| {
            C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn reconstruct(d: &Svd<f64>, m: usize, n: usize) -> CMat<f64> {
        let p = m.min(n);
        let mut us = d.u.clone();
        for j in 0..p {
            let sj = d.s[j];
            for z in us.col_mut(j) {
                *z *= sj;
            }
        }
        us.mul(&d.v.columns(0, p).adjoint())
    }

    fn orthonormality_error(q: &CMat<f64>) -> f64 {
        q.adjoint_mul(q)
            .sub(&CMat::identity(q.cols()))
            .frobenius_norm()
    }

    #[test]
    fn svd_reconstructs_tall_wide_and_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(m, n) in &[(4, 4), (6, 3), (2, 7), (1, 5), (5, 1), (16, 26)] {
            let a = random(m, n, &mut rng);
            let d = svd(&a);
            let err = reconstruct(&d, m, n).sub(&a).frobenius_norm();
            assert!(err < 1e-13 * a.frobenius_norm().max(1.0), "{m}x{n}: {err}");
            assert!(orthonormality_error(&d.v) < 1e-13);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues_2x2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random(2, 2, &mut rng);
            let g = a.mul(&a.adjoint());
            let (p, q, r) = (g[(0, 0)].re, g[(1, 1)].re, g[(0, 1)].norm_sqr());
            let disc = ((p - q) * (p - q) / 4.0 + r).sqrt();
            let l1 = (p + q) / 2.0 + disc;
            let l2 = (p + q) / 2.0 - disc;
            let d = svd(&a);
            assert!((d.s[0] - l1.sqrt()).abs() < 1e-12);
            assert!((d.s[1] - l2.max(0.0).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn null_space_of_identity_is_empty() {
        let b = null_space_basis(&CMat::<f64>::identity(3), 1e-10);
        assert_eq!(b.cols(), 0);
    }

    #[test]
    fn null_space_of_zero_matrix_is_everything() {
        let b = null_space_basis(&CMat::<f64>::zeros(2, 3), 1e-10);
        assert_eq!(b.shape(), (3, 3));
        assert!(orthonormality_error(&b) < 1e-14);
    }

    #[test]
    fn null_space_of_random_wide_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random(4, 6, &mut rng);
            let b = null_space_basis(&a, 1e-10);
            assert_eq!(b.cols(), 2);
            assert!(a.mul(&b).frobenius_norm() <= 1e-10);
            assert!(orthonormality_error(&b) < 1e-13);
        }
    }

    #[test]
    fn null_space_detects_rank_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random(5, 2, &mut rng);
        let y = random(2, 5, &mut rng);
        let a = x.mul(&y);
        let b = null_space_basis(&a, 1e-10);
        assert_eq!(b.cols(), 3);
        assert!(a.mul(&b).frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn svd_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(3, 5, &mut rng);
        let d1 = svd(&a);
        let d2 = svd(&a);
        assert_eq!(d1.v, d2.v);
        assert_eq!(d1.s, d2.s);
    }

    #[test]
    fn svd_works_in_single_precision() {
        let a = CMat::<f32>::from_fn(3, 3, |i, j| {
            C::new((i + 2 * j) as f32, (i * j) as f32 - 1.0)
        });
        let d = svd(&a);
        let b = null_space_basis(&a, 1e-5);
        assert!(a.mul(&b).frobenius_norm() < 1e-4 * d.s[0]);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 7;
        let x: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| x[i * n + k] * x[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += 0.5;
        }
        let truth: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * truth[j]).sum())
            .collect();
        let mut l = a.clone();
        cholesky_in_place(&mut l, n).unwrap();
        cholesky_solve(&l, n, &mut rhs);
        for (u, v) in rhs.iter().zip(&truth) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert_eq!(cholesky_in_place(&mut a, 2), Err(1));
    }
}
