//! Modified BD precoder: the scaled data beamformer `F_dot`, the redundant
//! beamformer `F_ddot`, the affine map `(t, gamma) -> G t + sqrt(gamma) b` and
//! the final precoder `F_hat = F_dot + F_ddot T`.
//!
//! The design vector `t` is subcarrier-major; on subcarrier `k` it holds the
//! columns of the `c_sum x d_sum` matrix `T_k` one after the other, so that
//! `t[k * c_sum * d_sum + i * c_sum + l] = T_k[l, i]`. Stacked transmit vectors
//! (`b`, `G t`) are antenna-major like every other `M K` buffer in the crate.

use crate::bd::BdFactors;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::{SymbolBlock, ValidatedConfig};
use crate::scalar::{czero, lit, Real, C};
use crate::socp::{SocpSolution, SolveStatus};

/// Operators defining the affine transmit map for one channel and symbol draw.
#[derive(Clone, Debug)]
pub struct DesignOperators<T: Real> {
    /// `K` blocks of shape `M x (c_sum d_sum)`.
    pub g_blocks: Vec<CMat<T>>,
    /// `K` blocks `F_ddot_k` of shape `M x c_sum`.
    pub f_ddot_blocks: Vec<CMat<T>>,
    /// Original BD transmit vector, antenna-major, length `M K`.
    pub b: Vec<C<T>>,
    pub symbols: SymbolBlock<T>,
    antennas: usize,
    subcarriers: usize,
    c_sum: usize,
    d_sum: usize,
}

impl<T: Real> DesignOperators<T> {
    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn c_sum(&self) -> usize {
        self.c_sum
    }

    pub fn d_sum(&self) -> usize {
        self.d_sum
    }

    /// Complex length of the design vector `t`.
    pub fn design_dim(&self) -> usize {
        self.c_sum * self.d_sum * self.subcarriers
    }

    /// `G t` as an antenna-major buffer.
    ///
    /// # Panics
    /// Panics if `t` has the wrong length.
    pub fn apply_g(&self, t: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(t.len(), self.design_dim(), "design vector length");
        let w = self.c_sum * self.d_sum;
        let k_n = self.subcarriers;
        let mut out = vec![czero(); self.antennas * k_n];
        for (k, g) in self.g_blocks.iter().enumerate() {
            let xk = g.mul_vec(&t[k * w..(k + 1) * w]);
            for (i, z) in xk.into_iter().enumerate() {
                out[i * k_n + k] = z;
            }
        }
        out
    }

    /// `G t + coeff * b`, antenna-major.
    pub fn transmit(&self, t: &[C<T>], coeff: T) -> Vec<C<T>> {
        let mut x = self.apply_g(t);
        for (xi, bi) in x.iter_mut().zip(&self.b) {
            *xi = *xi + *bi * coeff;
        }
        x
    }
}

/// Per-subcarrier data beamformers `sqrt(gamma) [U^1 V^1, ..., U^J V^J]`.
///
/// # Errors
/// `Range` if `gamma` is outside `(0, 1]`.
pub fn build_f_dot<T: Real>(factors: &BdFactors<T>, gamma: T) -> Result<Vec<CMat<T>>> {
    if !(gamma > T::zero() && gamma <= T::one()) {
        return Err(Error::Range(format!(
            "gamma in (0, 1] required, got {gamma}"
        )));
    }
    let alpha = vec![gamma; factors.users()];
    Ok(build_f_dot_weighted(factors, &alpha))
}

/// Data beamformers with a per-user scaling `sqrt(alpha_j)`.
pub fn build_f_dot_weighted<T: Real>(factors: &BdFactors<T>, alpha: &[T]) -> Vec<CMat<T>> {
    (0..factors.subcarriers())
        .map(|k| {
            let cols: Vec<CMat<T>> = (0..factors.users())
                .map(|j| factors.block(k, j).uv().scale_real(alpha[j].sqrt()))
                .collect();
            CMat::hstack(&cols.iter().collect::<Vec<_>>())
        })
        .collect()
}

/// Per-subcarrier redundant beamformers `[U^1 P^1, ..., U^J P^J]`.
pub fn build_f_ddot<T: Real>(factors: &BdFactors<T>) -> Vec<CMat<T>> {
    (0..factors.subcarriers())
        .map(|k| {
            let cols: Vec<CMat<T>> = (0..factors.users())
                .map(|j| factors.block(k, j).up())
                .collect();
            CMat::hstack(&cols.iter().collect::<Vec<_>>())
        })
        .collect()
}

/// `G_k = F_ddot_k [s_1 I, ..., s_d I]`.
fn g_block<T: Real>(f_ddot: &CMat<T>, s: &[C<T>]) -> CMat<T> {
    let blocks: Vec<CMat<T>> = s.iter().map(|&si| f_ddot.scale(si)).collect();
    CMat::hstack(&blocks.iter().collect::<Vec<_>>())
}

/// Builds `G` and `b` for one channel/symbol draw.
///
/// # Errors
/// `Dimension` if the symbol block does not match the configuration.
pub fn build_design_operators<T: Real>(
    factors: &BdFactors<T>,
    symbols: &SymbolBlock<T>,
    cfg: &ValidatedConfig,
) -> Result<DesignOperators<T>> {
    let (m, k_n) = (cfg.m(), cfg.k());
    if symbols.s.len() != k_n || symbols.s.iter().any(|v| v.len() != cfg.d_sum()) {
        return Err(Error::Dimension(format!(
            "symbol block must hold {k_n} vectors of length {}",
            cfg.d_sum()
        )));
    }
    if factors.subcarriers() != k_n || factors.users() != cfg.j() {
        return Err(Error::Dimension(
            "factors do not match configuration".into(),
        ));
    }
    let f_ddot_blocks = build_f_ddot(factors);
    let f_dot = build_f_dot(factors, T::one())?;
    let mut b = vec![czero(); m * k_n];
    let mut g_blocks = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let bk = f_dot[k].mul_vec(&symbols.s[k]);
        for (i, z) in bk.into_iter().enumerate() {
            b[i * k_n + k] = z;
        }
        g_blocks.push(g_block(&f_ddot_blocks[k], &symbols.s[k]));
    }
    Ok(DesignOperators {
        g_blocks,
        f_ddot_blocks,
        b,
        symbols: symbols.clone(),
        antennas: m,
        subcarriers: k_n,
        c_sum: cfg.c_sum(),
        d_sum: cfg.d_sum(),
    })
}

/// Final precoder and its parts.
#[derive(Clone, Debug)]
pub struct PrecoderBundle<T: Real> {
    /// `K` blocks `M x d_sum`.
    pub f_dot_blocks: Vec<CMat<T>>,
    /// `K` blocks `M x c_sum`.
    pub f_ddot_blocks: Vec<CMat<T>>,
    /// `K` blocks `c_sum x d_sum`.
    pub t_blocks: Vec<CMat<T>>,
    /// `K` blocks `F_hat_k = F_dot_k + F_ddot_k T_k`.
    pub f_hat_blocks: Vec<CMat<T>>,
    pub gamma_hat: T,
}

impl<T: Real> PrecoderBundle<T> {
    /// Antenna-major frequency-domain transmit buffer `F_hat_k s_k`.
    pub fn transmit(&self, symbols: &SymbolBlock<T>) -> Vec<C<T>> {
        let k_n = self.f_hat_blocks.len();
        let m = self.f_hat_blocks.first().map_or(0, |f| f.rows());
        let mut x = vec![czero(); m * k_n];
        for (k, f) in self.f_hat_blocks.iter().enumerate() {
            for (i, z) in f.mul_vec(&symbols.s[k]).into_iter().enumerate() {
                x[i * k_n + k] = z;
            }
        }
        x
    }

    /// Columns of `F_hat_k` carrying user `j`'s streams.
    pub fn user_columns(&self, cfg: &ValidatedConfig, k: usize, j: usize) -> CMat<T> {
        let o = cfg.stream_offset(j);
        self.f_hat_blocks[k].columns(o, o + cfg.d()[j])
    }
}

/// Splits `t` into the `c_sum x d_sum` blocks `T_k`.
pub fn t_blocks_from_vec<T: Real>(t: &[C<T>], cfg: &ValidatedConfig) -> Result<Vec<CMat<T>>> {
    let (c, d) = (cfg.c_sum(), cfg.d_sum());
    if t.len() != cfg.design_dim() {
        return Err(Error::Length {
            expected: cfg.design_dim(),
            got: t.len(),
        });
    }
    Ok(t.chunks(c * d)
        .map(|chunk| CMat::from_col_major(c, d, chunk.to_vec()))
        .collect())
}

/// Inverse of [`t_blocks_from_vec`].
pub fn t_vec_from_blocks<T: Real>(blocks: &[CMat<T>]) -> Vec<C<T>> {
    blocks
        .iter()
        .flat_map(|b| b.as_slice().iter().copied())
        .collect()
}

/// Assembles `F_hat` from a per-user retention vector `alpha` and design
/// vector `t`. The uniform design uses `alpha_j = gamma_hat` for every user.
pub fn assemble_from_parts<T: Real>(
    factors: &BdFactors<T>,
    alpha: &[T],
    gamma_hat: T,
    t: &[C<T>],
    cfg: &ValidatedConfig,
) -> Result<PrecoderBundle<T>> {
    if alpha.len() != cfg.j() {
        return Err(Error::Length {
            expected: cfg.j(),
            got: alpha.len(),
        });
    }
    let t_blocks = t_blocks_from_vec(t, cfg)?;
    let f_dot_blocks = build_f_dot_weighted(factors, alpha);
    let f_ddot_blocks = build_f_ddot(factors);
    let f_hat_blocks = f_dot_blocks
        .iter()
        .zip(&f_ddot_blocks)
        .zip(&t_blocks)
        .map(|((fd, fdd), tk)| fd.add(&fdd.mul(tk)))
        .collect();
    Ok(PrecoderBundle {
        f_dot_blocks,
        f_ddot_blocks,
        t_blocks,
        f_hat_blocks,
        gamma_hat,
    })
}

fn check_usable<T: Real>(solution: &SocpSolution<T>) -> Result<()> {
    if solution.status == SolveStatus::Infeasible {
        return Err(Error::State(
            "cannot assemble a precoder from an infeasible solve".into(),
        ));
    }
    Ok(())
}

/// Assembles `F_hat = F_dot(gamma_hat) + F_ddot T_hat` from a solve.
///
/// # Errors
/// `State` if the solve was infeasible; `Length` if `t_hat` has the wrong size.
pub fn assemble_precoder<T: Real>(
    factors: &BdFactors<T>,
    solution: &SocpSolution<T>,
    cfg: &ValidatedConfig,
) -> Result<PrecoderBundle<T>> {
    check_usable(solution)?;
    let g = solution.gamma_hat;
    if !(g > T::zero() && g <= T::one()) {
        return Err(Error::Range(format!(
            "gamma_hat in (0, 1] required, got {g}"
        )));
    }
    let alpha = vec![g; cfg.j()];
    assemble_from_parts(factors, &alpha, g, &solution.t_hat, cfg)
}

/// Variant of [`assemble_precoder`] where user `j`'s data beamformer is scaled
/// by `sqrt(alpha_j)`; see [`allocate_user_costs`]. The redundant part and the
/// peak constraint are left as solved.
pub fn assemble_precoder_with_costs<T: Real>(
    factors: &BdFactors<T>,
    solution: &SocpSolution<T>,
    alpha: &[T],
    cfg: &ValidatedConfig,
) -> Result<PrecoderBundle<T>> {
    check_usable(solution)?;
    if alpha.iter().any(|&a| !(a > T::zero() && a <= T::one())) {
        return Err(Error::Range("alpha_j in (0, 1] required".into()));
    }
    assemble_from_parts(factors, alpha, solution.gamma_hat, &solution.t_hat, cfg)
}

/// Splits the SNR retention `gamma_hat` across users in proportion to
/// `weights`, clipping at 1 and redistributing the remainder, so that
/// `sum_j alpha_j d_j / d_sum = gamma_hat`.
///
/// # Errors
/// `Length` on mismatched inputs, `Range` on non-positive weights or
/// `gamma_hat <= 0`, `InfeasibleAllocation` if the budget cannot be met with
/// every `alpha_j <= 1`.
pub fn allocate_user_costs(gamma_hat: f64, d: &[usize], weights: &[f64]) -> Result<Vec<f64>> {
    if d.len() != weights.len() {
        return Err(Error::Length {
            expected: d.len(),
            got: weights.len(),
        });
    }
    if d.is_empty() {
        return Err(Error::Dimension("at least one user required".into()));
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::Range("weights must be positive and finite".into()));
    }
    if !(gamma_hat > 0.0) {
        return Err(Error::Range(format!(
            "gamma_hat > 0 required, got {gamma_hat}"
        )));
    }
    let d_sum: usize = d.iter().sum();
    let total = gamma_hat * d_sum as f64;
    if total > d_sum as f64 * (1.0 + 1e-12) {
        return Err(Error::InfeasibleAllocation(format!(
            "gamma_hat = {gamma_hat} exceeds 1"
        )));
    }
    let mut clipped = vec![false; d.len()];
    loop {
        let fixed: f64 = d
            .iter()
            .zip(&clipped)
            .filter(|(_, &c)| c)
            .map(|(&dj, _)| dj as f64)
            .sum();
        let free_weight: f64 = d
            .iter()
            .zip(weights)
            .zip(&clipped)
            .filter(|(_, &c)| !c)
            .map(|((&dj, &w), _)| dj as f64 * w)
            .sum();
        let budget = total - fixed;
        if free_weight == 0.0 {
            if budget.abs() <= 1e-12 * total.max(1.0) {
                return Ok(vec![1.0; d.len()]);
            }
            return Err(Error::InfeasibleAllocation(
                "no user left to absorb the budget".into(),
            ));
        }
        let scale = budget / free_weight;
        let mut changed = false;
        for (j, &w) in weights.iter().enumerate() {
            if !clipped[j] && scale * w > 1.0 {
                clipped[j] = true;
                changed = true;
            }
        }
        if !changed {
            return Ok(weights
                .iter()
                .zip(&clipped)
                .map(|(&w, &c)| if c { 1.0 } else { scale * w })
                .collect());
        }
    }
}

/// Converts `f64` costs into the working scalar.
pub fn costs_as<T: Real>(alpha: &[f64]) -> Vec<T> {
    alpha.iter().map(|&a| lit(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bd::bd_decompose;
    use crate::model::{gen_channels, gen_symbols, validate_config, SystemConfig};
    use crate::scalar::norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        cfg: ValidatedConfig,
        factors: BdFactors<f64>,
        symbols: SymbolBlock<f64>,
    }

    fn fixture(m: usize, c: usize, k: usize, seed: u64) -> Fixture {
        let cfg =
            validate_config(&SystemConfig::new(m, 2, 2, k, vec![1, 1], vec![c, c], 1.8)).unwrap();
        let ch = gen_channels(&cfg, seed);
        let factors = bd_decompose(&ch, &cfg).unwrap();
        let symbols = gen_symbols(&cfg, seed).unwrap();
        Fixture {
            cfg,
            factors,
            symbols,
        }
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<C<f64>> {
        (0..n)
            .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn f_dot_scaling_and_shape() {
        let f = fixture(4, 1, 8, 1);
        let full = build_f_dot(&f.factors, 1.0).unwrap();
        let part = build_f_dot(&f.factors, 0.81).unwrap();
        for (a, b) in full.iter().zip(&part) {
            assert_eq!(a.shape(), (4, 2));
            for j in 0..2 {
                let na: f64 = norm(a.col(j));
                let nb: f64 = norm(b.col(j));
                assert!((nb - 0.9 * na).abs() < 1e-14);
            }
        }
        assert_eq!(full[3].columns(0, 1), f.factors.block(3, 0).uv());
        assert!(matches!(build_f_dot(&f.factors, 1.5), Err(Error::Range(_))));
        assert!(matches!(build_f_dot(&f.factors, 0.0), Err(Error::Range(_))));
    }

    #[test]
    fn f_ddot_nulls_effective_channels() {
        let cfg =
            validate_config(&SystemConfig::new(8, 2, 2, 8, vec![1, 1], vec![5, 5], 1.8)).unwrap();
        let ch = gen_channels::<f64>(&cfg, 2);
        let factors = bd_decompose(&ch, &cfg).unwrap();
        let fdd = build_f_ddot(&factors);
        for (k, fk) in fdd.iter().enumerate() {
            assert_eq!(fk.shape(), (8, 10));
            for j in 0..2 {
                let b = factors.block(k, j);
                assert!(b.r.mul(ch.h(k, j)).mul(fk).frobenius_norm() <= 1e-9);
                let o = cfg.redundancy_offset(j);
                let own = fk.columns(o, o + 5);
                let gram = own
                    .adjoint_mul(&own)
                    .sub(&CMat::identity(5))
                    .frobenius_norm();
                assert!(gram < 1e-10);
            }
        }
    }

    #[test]
    fn small_array_blocks_are_four_by_two() {
        let f = fixture(4, 1, 128, 3);
        let ops = build_design_operators(&f.factors, &f.symbols, &f.cfg).unwrap();
        assert!(ops.f_ddot_blocks.iter().all(|b| b.shape() == (4, 2)));
        assert!(ops.g_blocks.iter().all(|b| b.shape() == (4, 4)));
        assert_eq!(ops.design_dim(), 512);
    }

    #[test]
    fn g_times_t_equals_f_ddot_t_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = fixture(8, 5, 8, 4);
        let ops = build_design_operators(&f.factors, &f.symbols, &f.cfg).unwrap();
        let t = random_vec(ops.design_dim(), &mut rng);
        let gt = ops.apply_g(&t);
        let tb = t_blocks_from_vec(&t, &f.cfg).unwrap();
        for k in 0..f.cfg.k() {
            let direct = ops.f_ddot_blocks[k].mul(&tb[k]).mul_vec(&f.symbols.s[k]);
            for i in 0..8 {
                assert!((direct[i] - gt[i * f.cfg.k() + k]).norm() <= 1e-12);
            }
        }
        assert_eq!(t_vec_from_blocks(&tb), t);
    }

    #[test]
    fn zero_t_gives_bd_signal() {
        let f = fixture(4, 1, 16, 5);
        let ops = build_design_operators(&f.factors, &f.symbols, &f.cfg).unwrap();
        let zero = vec![C::new(0.0, 0.0); ops.design_dim()];
        let x = ops.transmit(&zero, 0.9f64.sqrt());
        for (a, b) in x.iter().zip(&ops.b) {
            assert!((a - b * 0.9f64.sqrt()).norm() < 1e-15);
        }
    }

    fn fake_solution(gamma: f64, t: Vec<C<f64>>, status: SolveStatus) -> SocpSolution<f64> {
        SocpSolution {
            gamma_hat: gamma,
            t_hat: t,
            status,
            ..SocpSolution::empty()
        }
    }

    #[test]
    fn assembled_precoder_reproduces_transmit_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = fixture(8, 5, 16, 6);
        let ops = build_design_operators(&f.factors, &f.symbols, &f.cfg).unwrap();
        let t = random_vec(ops.design_dim(), &mut rng);
        let sol = fake_solution(0.83, t.clone(), SolveStatus::Optimal);
        let p = assemble_precoder(&f.factors, &sol, &f.cfg).unwrap();
        let x = p.transmit(&f.symbols);
        let want = ops.transmit(&t, 0.83f64.sqrt());
        let err: f64 = norm(&x.iter().zip(&want).map(|(a, b)| a - b).collect::<Vec<_>>());
        assert!(err / norm(&ops.b) <= 1e-10);
    }

    #[test]
    fn identity_solution_recovers_bd() {
        let f = fixture(4, 1, 8, 7);
        let zero = vec![C::new(0.0, 0.0); f.cfg.design_dim()];
        let p = assemble_precoder(
            &f.factors,
            &fake_solution(1.0, zero, SolveStatus::Optimal),
            &f.cfg,
        )
        .unwrap();
        let bd = build_f_dot(&f.factors, 1.0).unwrap();
        for (a, b) in p.f_hat_blocks.iter().zip(&bd) {
            assert!(a.sub(b).frobenius_norm() == 0.0);
        }
    }

    #[test]
    fn precoder_stays_interference_free_with_scaled_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg =
            validate_config(&SystemConfig::new(8, 2, 2, 4, vec![2, 1], vec![3, 4], 1.8)).unwrap();
        let ch = gen_channels::<f64>(&cfg, 8);
        let factors = bd_decompose(&ch, &cfg).unwrap();
        let t = random_vec(cfg.design_dim(), &mut rng);
        let g = 0.7;
        let p = assemble_precoder(
            &factors,
            &fake_solution(g, t, SolveStatus::MaxIterations),
            &cfg,
        )
        .unwrap();
        for k in 0..cfg.k() {
            for j in 0..2 {
                let rh = factors.block(k, j).r.mul(ch.h(k, j));
                for l in 0..2 {
                    let e = rh.mul(&p.user_columns(&cfg, k, l));
                    if l == j {
                        let lam = &factors.block(k, j).lambda;
                        for a in 0..cfg.d()[j] {
                            for b in 0..cfg.d()[j] {
                                let want = if a == b { g.sqrt() * lam[a] } else { 0.0 };
                                assert!((e[(a, b)] - C::new(want, 0.0)).norm() <= 1e-9);
                            }
                        }
                    } else {
                        assert!(e.frobenius_norm() <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn infeasible_solution_cannot_be_assembled() {
        let f = fixture(4, 1, 8, 9);
        let zero = vec![C::new(0.0, 0.0); f.cfg.design_dim()];
        let r = assemble_precoder(
            &f.factors,
            &fake_solution(0.6, zero, SolveStatus::Infeasible),
            &f.cfg,
        );
        assert!(matches!(r, Err(Error::State(_))));
    }

    #[test]
    fn cost_allocation_examples() {
        assert_eq!(
            allocate_user_costs(0.9, &[1, 1], &[1.0, 1.0]).unwrap(),
            vec![0.9, 0.9]
        );
        let a = allocate_user_costs(0.75, &[1, 1], &[2.0, 1.0]).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-15 && (a[1] - 0.5).abs() < 1e-15);
        assert_eq!(allocate_user_costs(0.8, &[2], &[3.0]).unwrap(), vec![0.8]);
        let c = allocate_user_costs(0.9, &[1, 2, 1], &[5.0, 1.0, 1.0]).unwrap();
        assert_eq!(c[0], 1.0);
        let avg = (c[0] + 2.0 * c[1] + c[2]) / 4.0;
        assert!((avg - 0.9).abs() < 1e-14);
        assert!(matches!(
            allocate_user_costs(1.2, &[1, 1], &[1.0, 1.0]),
            Err(Error::InfeasibleAllocation(_))
        ));
        assert!(matches!(
            allocate_user_costs(0.5, &[1, 1], &[1.0, 0.0]),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn weighted_assembly_scales_user_gains() {
        let f = fixture(4, 1, 4, 10);
        let zero = vec![C::new(0.0, 0.0); f.cfg.design_dim()];
        let sol = fake_solution(0.75, zero, SolveStatus::Optimal);
        let alpha = allocate_user_costs(0.75, f.cfg.d(), &[2.0, 1.0]).unwrap();
        let p = assemble_precoder_with_costs(&f.factors, &sol, &costs_as::<f64>(&alpha), &f.cfg)
            .unwrap();
        let n0: f64 = norm(p.f_hat_blocks[0].col(0));
        let n1: f64 = norm(p.f_hat_blocks[0].col(1));
        assert!((n0 - 1.0).abs() < 1e-12 && (n1 - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
