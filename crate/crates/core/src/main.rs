use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mimo_par::error::Result;
use mimo_par::harness::invariants::run_checks;
use mimo_par::harness::{
    export_results, run_experiment, run_trial_detailed, write_precoder_dump, ExperimentResult,
    ExportFormat, Scenario,
};
use mimo_par::model::SystemConfig;

/// Runs with more than this fraction of infeasible trials exit with code 2.
const INFEASIBLE_LIMIT: f64 = 0.1;

#[derive(Parser)]
#[command(
    name = "mimo-par",
    version,
    about = "Peak-constrained multi-user MIMO-OFDM precoding experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long, default_value = "json")]
    format: ExportFormat,
    /// Also write the precoder of the first N feasible trials.
    #[arg(long, default_value_t = 0)]
    dump_precoder: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo run of one scenario.
    Run(RunArgs),
    /// Repeats a run for several values of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter name: M, N, J, K, d, c, P_s, sigma2, zeta, gamma_floor.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Structural and solver invariant checks on random instances.
    Check {
        /// Scenario file; defaults to M=4, N=J=2, K=64, d=c=[1,1], zeta=1.8.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn threads(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn print_summary(label: &str, res: &ExperimentResult) {
    match &res.summary {
        Some(s) => println!(
            "{label}: trials={} infeasible={} unconverged={} mean_par={:.4} ({:.3} dB) var_par_db={:.4} mean_gamma={:.5} min_gamma={:.5} ccdf1e-2={:.3} dB",
            res.n_trials,
            res.n_infeasible,
            res.n_unconverged,
            s.mean_par,
            s.mean_par_db,
            s.var_par_db,
            s.mean_gamma,
            s.min_gamma,
            s.par_db_at_ccdf_1e2
        ),
        None => println!("{label}: trials={} infeasible={} (no feasible trials)", res.n_trials, res.n_infeasible),
    }
}

/// Runs one scenario and writes its files; returns the infeasible fraction.
fn run_one(scenario: &Scenario, args: &RunArgs, out: &Path, label: &str) -> Result<f64> {
    let cfg = scenario.validate()?;
    let res = run_experiment(
        &cfg,
        &scenario.solver,
        args.trials,
        args.seed,
        threads(args.parallel),
    )?;
    export_results(&res, out, args.format)?;
    let mut dumped = 0;
    for r in res.records.iter().filter(|r| r.feasible) {
        if dumped >= args.dump_precoder {
            break;
        }
        let art = run_trial_detailed(&cfg, &scenario.solver, args.seed, r.trial_id)?;
        if let Some(p) = &art.precoder {
            write_precoder_dump(
                &out.join(format!("f_hat_trial{}.csv", r.trial_id)),
                p,
                r.trial_id,
                r.seed,
            )?;
            dumped += 1;
        }
    }
    print_summary(label, &res);
    Ok(res.infeasible_fraction())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let scenario = Scenario::load(&args.config)?;
            let frac = run_one(&scenario, &args, &args.out, "run")?;
            Ok(frac <= INFEASIBLE_LIMIT)
        }
        Command::Sweep { run, param, values } => {
            let base = Scenario::load(&run.config)?;
            let mut ok = true;
            for v in &values {
                let mut s = base.clone();
                s.set_param(&param, v)?;
                let label = format!("{param}={v}");
                let frac = run_one(&s, &run, &run.out.join(&label), &label)?;
                ok &= frac <= INFEASIBLE_LIMIT;
            }
            Ok(ok)
        }
        Command::Check {
            config,
            trials,
            seed,
        } => {
            let scenario = match config {
                Some(p) => Scenario::load(&p)?,
                None => Scenario::new(SystemConfig::new(4, 2, 2, 64, vec![1, 1], vec![1, 1], 1.8)),
            };
            let cfg = scenario.validate()?;
            let outcomes = run_checks(&cfg, &scenario.solver, trials, seed)?;
            let mut all = true;
            for c in &outcomes {
                println!(
                    "{} {}: worst {:.3e} (threshold {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.threshold
                );
                all &= c.passed;
            }
            if !all {
                return Err(mimo_par::error::Error::State(
                    "invariant check failed".into(),
                ));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!(
                "more than {:.0}% of trials infeasible",
                INFEASIBLE_LIMIT * 100.0
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
