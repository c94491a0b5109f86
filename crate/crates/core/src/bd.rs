//! Block diagonalization per subcarrier and user.
//!
//! For user `j` on subcarrier `k`, `U` spans the kernel of the stacked channel
//! of all other users, and an SVD of the projected channel `H U` yields the
//! stream beamformers `V`, receive combiners `R` and gains `lambda`. The
//! redundant directions `P` span the kernel of the effective channel `R H U`.

use crate::error::{Error, Result};
use crate::linalg::{null_space_basis, rank_tol, svd, CMat};
use crate::model::{ChannelRealization, ValidatedConfig};
use crate::scalar::Real;

/// Decomposition products for one `(k, j)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BdBlock<T: Real> {
    /// `M x q` orthonormal basis of the interference null space.
    pub u: CMat<T>,
    /// Singular values of `H U`, descending (length `min(N, q)`).
    pub lambda: Vec<T>,
    /// `q x d_j` leading right singular vectors of `H U`.
    pub v: CMat<T>,
    /// `d_j x N` conjugated leading left singular vectors of `H U`.
    pub r: CMat<T>,
    /// `q x c_j` orthonormal basis inside the kernel of `R H U`.
    pub p: CMat<T>,
}

impl<T: Real> BdBlock<T> {
    /// Original BD beamformer `U V` (`M x d_j`).
    pub fn uv(&self) -> CMat<T> {
        self.u.mul(&self.v)
    }

    /// Redundant beamformer `U P` (`M x c_j`).
    pub fn up(&self) -> CMat<T> {
        self.u.mul(&self.p)
    }
}

/// Factors for every subcarrier and user.
#[derive(Clone, Debug, PartialEq)]
pub struct BdFactors<T: Real> {
    pub q: usize,
    users: usize,
    subcarriers: usize,
    /// Indexed `k * J + j`.
    blocks: Vec<BdBlock<T>>,
}

impl<T: Real> BdFactors<T> {
    #[inline]
    pub fn block(&self, k: usize, j: usize) -> &BdBlock<T> {
        &self.blocks[k * self.users + j]
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn blocks(&self) -> &[BdBlock<T>] {
        &self.blocks
    }
}

/// Stacks the channels of every user except `j` (ascending user order) on
/// subcarrier `k`. For a single user the result has zero rows.
///
/// # Errors
/// `Index` if `j` or `k` is out of range.
pub fn stack_interference_channel<T: Real>(
    channels: &ChannelRealization<T>,
    j: usize,
    k: usize,
) -> Result<CMat<T>> {
    if j >= channels.users() {
        return Err(Error::Index(format!(
            "user {j} outside 0..{}",
            channels.users()
        )));
    }
    if k >= channels.subcarriers() {
        return Err(Error::Index(format!(
            "subcarrier {k} outside 0..{}",
            channels.subcarriers()
        )));
    }
    let others: Vec<&CMat<T>> = (0..channels.users())
        .filter(|&l| l != j)
        .map(|l| channels.h(k, l))
        .collect();
    if others.is_empty() {
        return Ok(CMat::zeros(0, channels.h(k, j).cols()));
    }
    Ok(CMat::vstack(&others))
}

/// Decomposes one user's channel `h` (`N x M`) against the stacked
/// interference channel `h_bar`; `None` means no other users, so `U = I`.
/// The returned block has an empty `P`.
///
/// # Errors
/// `RankDeficiency` if `h_bar` is not of full row rank or `H U` has rank
/// below `d_j`.
pub fn decompose_user<T: Real>(
    h: &CMat<T>,
    h_bar: Option<&CMat<T>>,
    d_j: usize,
) -> Result<BdBlock<T>> {
    let m = h.cols();
    let tol = rank_tol::<T>();
    let u = match h_bar {
        Some(hb) if hb.rows() > 0 => {
            let u = null_space_basis(hb, tol);
            let expected = m.saturating_sub(hb.rows());
            if u.cols() != expected {
                return Err(Error::RankDeficiency(format!(
                    "interference channel has null space of dimension {} instead of {expected}",
                    u.cols()
                )));
            }
            u
        }
        _ => CMat::identity(m),
    };
    let hu = h.mul(&u);
    let dec = svd(&hu);
    if dec.rank(tol) < d_j {
        return Err(Error::RankDeficiency(format!(
            "projected channel rank {} below d_j = {d_j}",
            dec.rank(tol)
        )));
    }
    let lambda = dec.s[..hu.rows().min(hu.cols())].to_vec();
    let v = dec.v.columns(0, d_j);
    let r = dec.u.columns(0, d_j).adjoint();
    Ok(BdBlock {
        p: CMat::zeros(u.cols(), 0),
        u,
        lambda,
        v,
        r,
    })
}

/// Runs the decomposition for every `(k, j)` and selects `c_j` redundant
/// directions per user.
///
/// # Errors
/// `RankDeficiency` on a degenerate channel draw.
pub fn bd_decompose<T: Real>(
    channels: &ChannelRealization<T>,
    cfg: &ValidatedConfig,
) -> Result<BdFactors<T>> {
    let (jn, kn) = (cfg.j(), cfg.k());
    let mut blocks = Vec::with_capacity(jn * kn);
    for k in 0..kn {
        for j in 0..jn {
            let h = channels.h(k, j);
            let block = if jn == 1 {
                decompose_user(h, None, cfg.d()[j])?
            } else {
                let hb = stack_interference_channel(channels, j, k)?;
                decompose_user(h, Some(&hb), cfg.d()[j])?
            };
            blocks.push(block);
        }
    }
    let mut factors = BdFactors {
        q: cfg.q(),
        users: jn,
        subcarriers: kn,
        blocks,
    };
    let ps = select_null_projectors(&factors, channels, cfg.c())?;
    for (b, p) in factors.blocks.iter_mut().zip(ps) {
        b.p = p;
    }
    Ok(factors)
}

/// Picks `c_j` orthonormal vectors from the kernel of `R H U` for each block,
/// in the deterministic order of [`null_space_basis`].
///
/// # Errors
/// `Dimension` if some `c_j` exceeds the kernel dimension `q - d_j`.
pub fn select_null_projectors<T: Real>(
    factors: &BdFactors<T>,
    channels: &ChannelRealization<T>,
    redundancy: &[usize],
) -> Result<Vec<CMat<T>>> {
    if redundancy.len() != factors.users {
        return Err(Error::Dimension(format!(
            "len(c) = {} does not match J = {}",
            redundancy.len(),
            factors.users
        )));
    }
    let tol = rank_tol::<T>();
    let mut out = Vec::with_capacity(factors.blocks.len());
    for k in 0..factors.subcarriers {
        for (j, &cj) in redundancy.iter().enumerate() {
            let b = factors.block(k, j);
            let eff = b.r.mul(&channels.h(k, j).mul(&b.u));
            let basis = null_space_basis(&eff, tol);
            if cj > basis.cols() {
                return Err(Error::Dimension(format!(
                    "c_{j} = {cj} exceeds effective-channel null space dimension {}",
                    basis.cols()
                )));
            }
            out.push(basis.columns(0, cj));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_channels, validate_config, SystemConfig};
    use crate::scalar::C;

    fn setup(
        m: usize,
        n: usize,
        j: usize,
        d: Vec<usize>,
        c: Vec<usize>,
        seed: u64,
    ) -> (ValidatedConfig, ChannelRealization<f64>) {
        let cfg = validate_config(&SystemConfig::new(m, n, j, 8, d, c, 1.8)).unwrap();
        let ch = gen_channels(&cfg, seed);
        (cfg, ch)
    }

    fn orth_err(q: &CMat<f64>) -> f64 {
        q.adjoint_mul(q)
            .sub(&CMat::identity(q.cols()))
            .frobenius_norm()
    }

    #[test]
    fn two_user_stacking_swaps_users() {
        let (_, ch) = setup(4, 2, 2, vec![1, 1], vec![1, 1], 1);
        assert_eq!(stack_interference_channel(&ch, 0, 3).unwrap(), *ch.h(3, 1));
        assert_eq!(stack_interference_channel(&ch, 1, 3).unwrap(), *ch.h(3, 0));
        assert!(matches!(
            stack_interference_channel(&ch, 2, 0),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn three_user_stacking_order() {
        let (_, ch) = setup(4, 1, 3, vec![1, 1, 1], vec![1, 1, 1], 2);
        let s = stack_interference_channel(&ch, 1, 0).unwrap();
        assert_eq!(s.shape(), (2, 4));
        assert_eq!(s.row_range(0, 1), *ch.h(0, 0));
        assert_eq!(s.row_range(1, 2), *ch.h(0, 2));
    }

    #[test]
    fn scalar_channel() {
        let h = CMat::<f64>::from_col_major(1, 1, vec![C::new(0.6, -0.8)]);
        let b = decompose_user(&h, None, 1).unwrap();
        assert_eq!(b.u, CMat::identity(1));
        assert!((b.lambda[0] - 1.0).abs() < 1e-15);
        assert!((b.v[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((b.r[(0, 0)].norm() - 1.0).abs() < 1e-15);
        let g = b.r.mul(&h).mul(&b.v)[(0, 0)];
        assert!((g - C::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn factor_invariants_on_random_draws() {
        for seed in 0..20 {
            for &(m, n, j, ref d, ref c) in &[
                (
                    4usize,
                    2usize,
                    2usize,
                    vec![1usize, 1usize],
                    vec![1usize, 1usize],
                ),
                (8, 2, 2, vec![1, 2], vec![5, 4]),
                (6, 1, 3, vec![1, 1, 1], vec![3, 2, 1]),
                (3, 2, 1, vec![2], vec![1]),
            ] {
                let (cfg, ch) = setup(m, n, j, d.clone(), c.clone(), seed);
                let f = bd_decompose(&ch, &cfg).unwrap();
                for k in 0..cfg.k() {
                    for u in 0..j {
                        let b = f.block(k, u);
                        let h = ch.h(k, u);
                        assert_eq!(b.u.shape(), (m, cfg.q()));
                        if j > 1 {
                            let hb = stack_interference_channel(&ch, u, k).unwrap();
                            assert!(hb.mul(&b.u).frobenius_norm() <= 1e-10 * hb.frobenius_norm());
                        }
                        assert!(orth_err(&b.u) < 1e-12);
                        assert!(orth_err(&b.v) < 1e-12);
                        assert!(orth_err(&b.r.adjoint()) < 1e-12);
                        assert!(orth_err(&b.p) < 1e-12);
                        assert_eq!(b.p.shape(), (cfg.q(), c[u]));
                        let eff = b.r.mul(h).mul(&b.u);
                        let diag = eff.mul(&b.v);
                        for a in 0..d[u] {
                            for bb in 0..d[u] {
                                let want = if a == bb { b.lambda[a] } else { 0.0 };
                                assert!(
                                    (diag[(a, bb)] - C::new(want, 0.0)).norm()
                                        <= 1e-9 * b.lambda[0]
                                );
                            }
                        }
                        assert!(eff.mul(&b.p).frobenius_norm() <= 1e-10 * b.lambda[0]);
                        assert!(b.lambda.windows(2).all(|w| w[0] >= w[1]));
                        for l in 0..j {
                            if l != u {
                                let leak = b.r.mul(h).mul(&f.block(k, l).uv());
                                assert!(leak.frobenius_norm() <= 1e-9);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn single_user_uses_identity() {
        let (cfg, ch) = setup(3, 2, 1, vec![2], vec![1], 4);
        let f = bd_decompose(&ch, &cfg).unwrap();
        assert_eq!(f.block(0, 0).u, CMat::identity(3));
    }

    #[test]
    fn gains_match_gram_eigenvalues() {
        let (cfg, ch) = setup(4, 2, 2, vec![1, 1], vec![1, 1], 9);
        let f = bd_decompose(&ch, &cfg).unwrap();
        for k in 0..cfg.k() {
            let b = f.block(k, 0);
            let hu = ch.h(k, 0).mul(&b.u);
            let g = hu.mul(&hu.adjoint());
            let (p, q, r) = (g[(0, 0)].re, g[(1, 1)].re, g[(0, 1)].norm_sqr());
            let disc = ((p - q) * (p - q) / 4.0 + r).sqrt();
            assert!((b.lambda[0] - ((p + q) / 2.0 + disc).sqrt()).abs() < 1e-8);
            assert!((b.lambda[1] - ((p + q) / 2.0 - disc).max(0.0).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn four_antenna_projector_shape() {
        let (cfg, ch) = setup(4, 2, 2, vec![1, 1], vec![1, 1], 5);
        let f = bd_decompose(&ch, &cfg).unwrap();
        assert_eq!(f.block(0, 1).p.shape(), (2, 1));
    }

    #[test]
    fn too_many_projectors_is_rejected() {
        let (cfg, ch) = setup(4, 2, 2, vec![1, 1], vec![1, 1], 5);
        let f = bd_decompose(&ch, &cfg).unwrap();
        assert!(matches!(
            select_null_projectors(&f, &ch, &[2, 1]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rank_deficient_interference_is_reported() {
        let h = CMat::<f64>::from_fn(1, 3, |_, j| C::new(j as f64 + 1.0, 0.0));
        let hb = CMat::vstack(&[&h, &h]);
        assert!(matches!(
            decompose_user(&h, Some(&hb), 1),
            Err(Error::RankDeficiency(_))
        ));
    }

    #[test]
    fn decomposition_is_deterministic() {
        let (cfg, ch) = setup(8, 2, 2, vec![1, 1], vec![5, 5], 3);
        assert_eq!(
            bd_decompose(&ch, &cfg).unwrap(),
            bd_decompose(&ch, &cfg).unwrap()
        );
    }
}
