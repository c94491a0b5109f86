//! Structural residuals of a decomposition and precoder, and the `check`
//! suite built on them.

use serde::Serialize;

use crate::bd::{stack_interference_channel, BdFactors};
use crate::dft::UnitaryDft;
use crate::error::Result;
use crate::linalg::CMat;
use crate::model::{ChannelRealization, ValidatedConfig};
use crate::precoder::PrecoderBundle;
use crate::scalar::C;
use crate::socp::{build_problem, check_kkt, SolveStatus, SolverOptions};

use super::run_trial_detailed;

/// Largest `||H_bar U||_F` over all subcarriers and users.
///
/// # Errors
/// `Index` if the factors and channels disagree in size.
pub fn null_space_residual(
    channels: &ChannelRealization<f64>,
    factors: &BdFactors<f64>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..factors.subcarriers() {
        for j in 0..factors.users() {
            let hb = stack_interference_channel(channels, j, k)?;
            if hb.rows() > 0 {
                worst = worst.max(hb.mul(&factors.block(k, j).u).frobenius_norm());
            }
        }
    }
    Ok(worst)
}

/// Largest `||R_l H_l F_hat^(j)||_F` over subcarriers and user pairs `l != j`,
/// where `F_hat^(j)` holds user `j`'s columns.
pub fn interference_residual(
    channels: &ChannelRealization<f64>,
    factors: &BdFactors<f64>,
    precoder: &PrecoderBundle<f64>,
    cfg: &ValidatedConfig,
) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..cfg.k() {
        for j in 0..cfg.j() {
            let fj = precoder.user_columns(cfg, k, j);
            for l in (0..cfg.j()).filter(|&l| l != j) {
                let rl = &factors.block(k, l).r;
                let e = rl.mul(&channels.h(k, l).mul(&fj));
                worst = worst.max(e.frobenius_norm());
            }
        }
    }
    worst
}

/// Largest `||R_j H_j F_hat^(j) - sqrt(gamma_hat) diag(lambda_j)||_F`.
pub fn effective_channel_residual(
    channels: &ChannelRealization<f64>,
    factors: &BdFactors<f64>,
    precoder: &PrecoderBundle<f64>,
    cfg: &ValidatedConfig,
) -> f64 {
    let g = precoder.gamma_hat.sqrt();
    let mut worst = 0.0f64;
    for k in 0..cfg.k() {
        for j in 0..cfg.j() {
            let b = factors.block(k, j);
            let eff =
                b.r.mul(&channels.h(k, j).mul(&precoder.user_columns(cfg, k, j)));
            let dj = cfg.d()[j];
            let target = CMat::from_fn(dj, dj, |r, c| {
                if r == c {
                    C::new(g * b.lambda[r], 0.0)
                } else {
                    C::new(0.0, 0.0)
                }
            });
            worst = worst.max(eff.sub(&target).frobenius_norm());
        }
    }
    worst
}

/// `| ||Q x|| - ||x|| | / ||x||` for the per-antenna unitary inverse DFT.
pub fn unitary_residual(x: &[C<f64>], k: usize) -> f64 {
    let n0: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut y = x.to_vec();
    UnitaryDft::new(k).inverse_blocks(&mut y);
    let n1: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (n1 - n0).abs() / n0.max(f64::MIN_POSITIVE)
}

/// Result of one check over a batch of trials.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Largest residual observed.
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Acc {
    null: f64,
    interference: f64,
    effective: f64,
    unitary: f64,
    peak: f64,
    ball: f64,
    gap: f64,
}

/// Runs `n` trials and reports the worst structural and solver residuals.
///
/// # Errors
/// Any trial error.
pub fn run_checks(
    cfg: &ValidatedConfig,
    solver: &SolverOptions,
    n: usize,
    seed: u64,
) -> Result<Vec<CheckOutcome>> {
    let mut acc = Acc::default();
    for id in 0..n as u64 {
        let art = run_trial_detailed(cfg, solver, seed, id)?;
        acc.null = acc
            .null
            .max(null_space_residual(&art.channels, &art.factors)?);
        if let Some(pre) = &art.precoder {
            acc.interference =
                acc.interference
                    .max(interference_residual(&art.channels, &art.factors, pre, cfg));
            acc.effective = acc.effective.max(effective_channel_residual(
                &art.channels,
                &art.factors,
                pre,
                cfg,
            ));
            acc.unitary = acc
                .unitary
                .max(unitary_residual(&pre.transmit(&art.ops.symbols), cfg.k()));
        }
        if art.solution.status == SolveStatus::Optimal {
            let problem = build_problem(&art.ops, cfg);
            let r = check_kkt(&problem, &art.solution);
            acc.peak = acc.peak.max(r.peak_residual);
            acc.ball = acc.ball.max(r.ball_residual);
            acc.gap = acc.gap.max(r.gap / art.solution.gamma_hat.abs().max(1.0));
        }
    }
    let out = |name, worst: f64, threshold| CheckOutcome {
        name,
        worst,
        threshold,
        passed: worst <= threshold,
    };
    Ok(vec![
        out("null_space", acc.null, 1e-10),
        out("interference_free", acc.interference, 1e-9),
        out("effective_channel", acc.effective, 1e-9),
        out("unitary_transform", acc.unitary, 1e-12),
        out("peak_residual", acc.peak, solver.tol_feas),
        out("ball_residual", acc.ball, solver.tol_ball),
        out("certified_gap", acc.gap, solver.tol_gap),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, SystemConfig};

    #[test]
    fn checks_pass_on_small_scenario() {
        let v =
            validate_config(&SystemConfig::new(4, 2, 2, 16, vec![1, 1], vec![1, 1], 1.8)).unwrap();
        let out = run_checks(&v, &SolverOptions::default(), 5, 1).unwrap();
        assert_eq!(out.len(), 7);
        for c in out {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn unitary_residual_of_random_signal() {
        let x: Vec<C<f64>> = (0..64)
            .map(|i| C::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        assert!(unitary_residual(&x, 16) < 1e-14);
    }
}
