//! Monte-Carlo trials, aggregation and result files.
//!
//! A trial is fully determined by `(master_seed, trial_id)`: the trial seed
//! drives independent channel and symbol streams, so results do not depend on
//! how trials are scheduled across threads.

pub mod export;
pub mod invariants;
pub mod scenario;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bd::{bd_decompose, BdFactors};
use crate::error::{Error, Result};
use crate::metrics::{mean_variance, to_db, EmpiricalDistribution, ParReport};
use crate::model::{
    gen_channels, gen_symbols, to_time_domain, trial_seed, ChannelRealization, SystemConfig,
    ValidatedConfig,
};
use crate::precoder::{assemble_precoder, build_design_operators, DesignOperators, PrecoderBundle};
use crate::socp::{build_problem, solve, Method, SocpSolution, SolveStatus, SolverOptions};

pub use export::{export_results, write_precoder_dump, ExportFormat};
pub use scenario::Scenario;

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub gamma_hat: f64,
    /// Certified upper bound on the optimal retention.
    pub upper_bound: f64,
    pub status: SolveStatus,
    pub method: Method,
    pub iterations: usize,
    /// True when a point with `gamma_hat >= gamma_floor` was found; only such
    /// trials enter the PAR statistics.
    pub feasible: bool,
    /// Per-antenna PAR, linear; empty for infeasible trials.
    pub per_antenna_par: Vec<f64>,
    /// The same in dB.
    pub per_antenna_par_db: Vec<f64>,
    pub par_stacked_db: Option<f64>,
    pub relaxed_measure: Option<f64>,
    pub approx_measure: Option<f64>,
    /// Squared norm of the design vector over the ball radius squared.
    pub ball_fill: Option<f64>,
    pub solver_wall_time: f64,
}

/// A trial with its intermediate products.
#[derive(Clone, Debug)]
pub struct TrialArtifacts {
    pub record: TrialRecord,
    pub channels: ChannelRealization<f64>,
    pub factors: BdFactors<f64>,
    pub ops: DesignOperators<f64>,
    pub solution: SocpSolution<f64>,
    /// `None` for infeasible trials.
    pub precoder: Option<PrecoderBundle<f64>>,
    pub report: Option<ParReport>,
}

/// Runs one trial and keeps the channel, factors and precoder.
///
/// # Errors
/// `RankDeficiency` on a degenerate channel draw; solver non-convergence is
/// reported through the record's status instead.
pub fn run_trial_detailed(
    cfg: &ValidatedConfig,
    solver: &SolverOptions,
    master_seed: u64,
    trial_id: u64,
) -> Result<TrialArtifacts> {
    let seed = trial_seed(master_seed, trial_id);
    let channels = gen_channels::<f64>(cfg, seed);
    let factors = bd_decompose(&channels, cfg)?;
    let symbols = gen_symbols::<f64>(cfg, seed)?;
    let ops = build_design_operators(&factors, &symbols, cfg)?;
    let problem = build_problem(&ops, cfg);
    let sol = solve(&problem, solver);
    let feasible = sol.status != SolveStatus::Infeasible && sol.gamma_hat >= cfg.gamma_floor();
    let mut record = TrialRecord {
        trial_id,
        seed,
        gamma_hat: sol.gamma_hat,
        upper_bound: sol.upper_bound,
        status: sol.status,
        method: sol.method,
        iterations: sol.iterations,
        feasible,
        per_antenna_par: Vec::new(),
        per_antenna_par_db: Vec::new(),
        par_stacked_db: None,
        relaxed_measure: None,
        approx_measure: None,
        ball_fill: None,
        solver_wall_time: sol.wall_time,
    };
    if !feasible {
        return Ok(TrialArtifacts {
            record,
            channels,
            factors,
            ops,
            solution: sol,
            precoder: None,
            report: None,
        });
    }
    let precoder = assemble_precoder(&factors, &sol, cfg)?;
    let x_time = to_time_domain(&precoder.transmit(&symbols), cfg)?;
    let report = ParReport::new(&x_time, &sol.t_hat, sol.gamma_hat, &ops, cfg)?;
    record.per_antenna_par = report.per_antenna.clone();
    record.per_antenna_par_db = report.per_antenna.iter().map(|&p| to_db(p)).collect();
    record.par_stacked_db = Some(to_db(report.stacked_relaxed));
    record.relaxed_measure = Some(report.relaxed_measure);
    record.approx_measure = Some(report.approx_measure);
    let radius2 = (cfg.d_sum() * cfg.k()) as f64 * (1.0 - sol.gamma_hat);
    let t2: f64 = sol.t_hat.iter().map(|z| z.norm_sqr()).sum();
    record.ball_fill = (radius2 > 0.0).then(|| t2 / radius2);
    Ok(TrialArtifacts {
        record,
        channels,
        factors,
        ops,
        solution: sol,
        precoder: Some(precoder),
        report: Some(report),
    })
}

/// Runs one trial: channel, decomposition, design operators, solve, precoder
/// assembly, inverse DFT and PAR measures.
///
/// # Errors
/// As [`run_trial_detailed`].
pub fn run_trial(
    cfg: &ValidatedConfig,
    solver: &SolverOptions,
    master_seed: u64,
    trial_id: u64,
) -> Result<TrialRecord> {
    run_trial_detailed(cfg, solver, master_seed, trial_id).map(|a| a.record)
}

/// Aggregate statistics over the feasible trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_feasible: usize,
    pub mean_par: f64,
    pub var_par: f64,
    pub mean_par_db: f64,
    pub var_par_db: f64,
    pub mean_gamma: f64,
    pub min_gamma: f64,
    /// `-10 log10(min gamma)`.
    pub max_snr_cost_db: f64,
    /// Per-antenna PAR (dB) at which the CCDF drops to `1e-2`.
    pub par_db_at_ccdf_1e2: f64,
}

impl Summary {
    /// Computes the summary from the sample vectors; `None` without samples.
    pub fn from_samples(gamma: &[f64], par: &[f64]) -> Option<Self> {
        if gamma.is_empty() || par.is_empty() {
            return None;
        }
        let (mean_par, var_par) = mean_variance(par);
        let par_db: Vec<f64> = par.iter().map(|&p| to_db(p)).collect();
        let (mean_par_db, var_par_db) = mean_variance(&par_db);
        let (mean_gamma, _) = mean_variance(gamma);
        let min_gamma = gamma.iter().copied().fold(f64::INFINITY, f64::min);
        let dist = EmpiricalDistribution::new(par_db).ok()?;
        Some(Self {
            n_feasible: gamma.len(),
            mean_par,
            var_par,
            mean_par_db,
            var_par_db,
            mean_gamma,
            min_gamma,
            max_snr_cost_db: -to_db(min_gamma),
            par_db_at_ccdf_1e2: dist.ccdf_point(1e-2),
        })
    }
}

/// Distribution curves as `(x, probability)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CdfCurves {
    /// CDF of per-antenna PAR in dB.
    pub par_db: Vec<(f64, f64)>,
    /// CDF of the retention ratio `gamma_hat` (linear).
    pub gamma: Vec<(f64, f64)>,
}

/// Everything produced by one Monte-Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: SystemConfig,
    pub solver: SolverOptions,
    pub master_seed: u64,
    pub n_trials: usize,
    /// Trials without a point at or above the retention floor.
    pub n_infeasible: usize,
    /// Feasible trials whose optimality was not certified.
    pub n_unconverged: usize,
    /// Ordered by `trial_id`.
    pub records: Vec<TrialRecord>,
    /// `gamma_hat` of every feasible trial.
    pub gamma_samples: Vec<f64>,
    /// Per-antenna PAR (linear) of every feasible trial, trial-major.
    pub par_samples: Vec<f64>,
    pub summary: Option<Summary>,
    /// CCDF of per-antenna PAR in dB.
    pub ccdf_curve: Vec<(f64, f64)>,
    pub cdf_curves: CdfCurves,
}

impl ExperimentResult {
    /// Aggregates records ordered by `trial_id`.
    pub fn from_records(
        config: SystemConfig,
        solver: SolverOptions,
        master_seed: u64,
        records: Vec<TrialRecord>,
    ) -> Self {
        let mut gamma_samples = Vec::new();
        let mut par_samples = Vec::new();
        let mut n_infeasible = 0;
        let mut n_unconverged = 0;
        for r in &records {
            if !r.feasible {
                n_infeasible += 1;
                continue;
            }
            if r.status != SolveStatus::Optimal {
                n_unconverged += 1;
            }
            gamma_samples.push(r.gamma_hat);
            par_samples.extend_from_slice(&r.per_antenna_par);
        }
        let summary = Summary::from_samples(&gamma_samples, &par_samples);
        let par_db: Vec<f64> = par_samples.iter().map(|&p| to_db(p)).collect();
        let (ccdf_curve, cdf_curves) = match (
            EmpiricalDistribution::new(par_db),
            EmpiricalDistribution::new(gamma_samples.clone()),
        ) {
            (Ok(p), Ok(g)) => (
                p.ccdf_curve(),
                CdfCurves {
                    par_db: p.cdf_curve(),
                    gamma: g.cdf_curve(),
                },
            ),
            _ => (Vec::new(), CdfCurves::default()),
        };
        Self {
            config,
            solver,
            master_seed,
            n_trials: records.len(),
            n_infeasible,
            n_unconverged,
            records,
            gamma_samples,
            par_samples,
            summary,
            ccdf_curve,
            cdf_curves,
        }
    }

    /// Fraction of trials counted infeasible.
    pub fn infeasible_fraction(&self) -> f64 {
        if self.n_trials == 0 {
            0.0
        } else {
            self.n_infeasible as f64 / self.n_trials as f64
        }
    }

    /// Copy with solver wall times zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.records
            .iter_mut()
            .for_each(|r| r.solver_wall_time = 0.0);
        out
    }
}

/// Runs `n_trials` trials on `parallelism` threads and aggregates them in
/// `trial_id` order.
///
/// # Errors
/// `Range` if `n_trials` or `parallelism` is zero, `State` if the thread pool
/// cannot be created, and any trial error.
pub fn run_experiment(
    cfg: &ValidatedConfig,
    solver: &SolverOptions,
    n_trials: usize,
    master_seed: u64,
    parallelism: usize,
) -> Result<ExperimentResult> {
    if n_trials == 0 {
        return Err(Error::Range("n_trials >= 1 required".into()));
    }
    if parallelism == 0 {
        return Err(Error::Range("parallelism >= 1 required".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::State(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|id| run_trial(cfg, solver, master_seed, id))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ExperimentResult::from_records(
        cfg.config().clone(),
        solver.clone(),
        master_seed,
        records,
    ))
}
