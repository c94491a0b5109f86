//! Result files: JSON, per-sample CSV, distribution curves and precoder dumps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::to_db;
use crate::precoder::PrecoderBundle;

use super::ExperimentResult;

/// Main export format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExportFormat {
    /// `result.json` with the full result.
    #[default]
    Json,
    /// `par_samples.csv` with one row per antenna sample, plus `summary.json`.
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Range(format!("unknown format {s:?}"))),
        }
    }
}

pub const RESULT_FILE: &str = "result.json";
pub const SAMPLES_FILE: &str = "par_samples.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CCDF_PAR_FILE: &str = "ccdf_par.csv";
pub const CDF_PAR_FILE: &str = "cdf_par.csv";
pub const CDF_GAMMA_FILE: &str = "cdf_gamma.csv";

fn write_curve(path: &Path, points: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x_db", "probability"])?;
    for (x, p) in points {
        w.write_record([format!("{x:?}"), format!("{p:?}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `result` into the directory `dir` (created if missing) and returns
/// the paths written.
///
/// Besides the main file, three curve files with columns `x_db,probability`
/// are always written: the CCDF and CDF of per-antenna PAR, and the CDF of
/// `gamma_hat` with `x_db = 10 log10(gamma_hat)`.
///
/// # Errors
/// `Io`, `Serde` or `Csv` on write failures.
pub fn export_results(
    result: &ExperimentResult,
    dir: &Path,
    format: ExportFormat,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match format {
        ExportFormat::Json => {
            let path = dir.join(RESULT_FILE);
            let mut w = BufWriter::new(File::create(&path)?);
            serde_json::to_writer_pretty(&mut w, result)?;
            w.flush()?;
            written.push(path);
        }
        ExportFormat::Csv => {
            let path = dir.join(SAMPLES_FILE);
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["trial_id", "antenna", "par_db", "gamma_hat", "status"])?;
            for r in result.records.iter().filter(|r| r.feasible) {
                let status = serde_json::to_value(r.status)?;
                let status = status.as_str().unwrap_or_default().to_string();
                for (i, db) in r.per_antenna_par_db.iter().enumerate() {
                    w.write_record([
                        r.trial_id.to_string(),
                        i.to_string(),
                        format!("{db:?}"),
                        format!("{:?}", r.gamma_hat),
                        status.clone(),
                    ])?;
                }
            }
            w.flush()?;
            written.push(path);
            let path = dir.join(SUMMARY_FILE);
            let summary = serde_json::json!({
                "config": result.config,
                "solver": result.solver,
                "master_seed": result.master_seed,
                "n_trials": result.n_trials,
                "n_infeasible": result.n_infeasible,
                "n_unconverged": result.n_unconverged,
                "summary": result.summary,
            });
            fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
            written.push(path);
        }
    }
    let path = dir.join(CCDF_PAR_FILE);
    write_curve(&path, result.ccdf_curve.iter().copied())?;
    written.push(path);
    let path = dir.join(CDF_PAR_FILE);
    write_curve(&path, result.cdf_curves.par_db.iter().copied())?;
    written.push(path);
    let path = dir.join(CDF_GAMMA_FILE);
    write_curve(
        &path,
        result.cdf_curves.gamma.iter().map(|&(g, p)| (to_db(g), p)),
    )?;
    written.push(path);
    Ok(written)
}

/// Reads a result written with [`ExportFormat::Json`].
///
/// # Errors
/// `Io` or `Serde`.
pub fn load_result(path: &Path) -> Result<ExperimentResult> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Reads a two-column curve file.
///
/// # Errors
/// `Io` or `Csv`.
pub fn read_curve(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Writes the precoder blocks `F_hat_k` as text: a `#`-prefixed header
/// followed by rows `k,col,row,re,im`, each `M x d_sum` block in column-major
/// order, blocks in subcarrier order.
///
/// # Errors
/// `Io` on write failures.
pub fn write_precoder_dump(
    path: &Path,
    bundle: &PrecoderBundle<f64>,
    trial_id: u64,
    seed: u64,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let k_n = bundle.f_hat_blocks.len();
    let (m, d) = bundle.f_hat_blocks.first().map_or((0, 0), |b| b.shape());
    writeln!(w, "# precoder F_hat for trial_id={trial_id} seed={seed}")?;
    writeln!(
        w,
        "# K={k_n} M={m} d_sum={d} gamma_hat={:?}",
        bundle.gamma_hat
    )?;
    writeln!(
        w,
        "# each block is M x d_sum, listed column-major; blocks ordered by subcarrier k"
    )?;
    writeln!(w, "k,col,row,re,im")?;
    for (k, b) in bundle.f_hat_blocks.iter().enumerate() {
        for c in 0..b.cols() {
            for (r, z) in b.col(c).iter().enumerate() {
                writeln!(w, "{k},{c},{r},{:?},{:?}", z.re, z.im)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, run_trial_detailed};
    use crate::metrics::EmpiricalDistribution;
    use crate::model::{validate_config, SystemConfig};
    use crate::socp::SolverOptions;

    fn result() -> ExperimentResult {
        let v =
            validate_config(&SystemConfig::new(4, 2, 2, 16, vec![1, 1], vec![1, 1], 1.8)).unwrap();
        run_experiment(&v, &SolverOptions::default(), 5, 9, 1).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let res = result();
        let dir = tempfile::tempdir().unwrap();
        export_results(&res, dir.path(), ExportFormat::Json).unwrap();
        let back = load_result(&dir.path().join(RESULT_FILE)).unwrap();
        assert_eq!(back.summary, res.summary);
        assert_eq!(back, res);
    }

    #[test]
    fn csv_has_one_row_per_antenna_sample() {
        let res = result();
        let dir = tempfile::tempdir().unwrap();
        export_results(&res, dir.path(), ExportFormat::Csv).unwrap();
        let mut r = csv::Reader::from_path(dir.path().join(SAMPLES_FILE)).unwrap();
        let headers = r.headers().unwrap().clone();
        assert_eq!(
            headers.iter().collect::<Vec<_>>(),
            ["trial_id", "antenna", "par_db", "gamma_hat", "status"]
        );
        let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        let feasible = res.records.iter().filter(|r| r.feasible).count();
        assert_eq!(rows.len(), feasible * 4);
        assert!(dir.path().join(SUMMARY_FILE).exists());
    }

    #[test]
    fn curve_file_matches_estimator() {
        let res = result();
        let dir = tempfile::tempdir().unwrap();
        export_results(&res, dir.path(), ExportFormat::Json).unwrap();
        let curve = read_curve(&dir.path().join(CCDF_PAR_FILE)).unwrap();
        let dist = EmpiricalDistribution::new(res.par_samples.iter().map(|&p| to_db(p)).collect())
            .unwrap();
        assert!(!curve.is_empty());
        for (x, p) in curve {
            assert!((dist.ccdf(x) - p).abs() <= 1e-12);
        }
        let zeta_db = to_db(1.8);
        let step = res
            .ccdf_curve
            .iter()
            .filter(|(x, _)| *x >= zeta_db)
            .map(|&(_, p)| p)
            .next()
            .unwrap_or(0.0);
        assert!((dist.ccdf(zeta_db) - step).abs() <= 1e-12);
    }

    #[test]
    fn precoder_dump_layout() {
        let v =
            validate_config(&SystemConfig::new(4, 2, 2, 8, vec![1, 1], vec![1, 1], 1.8)).unwrap();
        let art = run_trial_detailed(&v, &SolverOptions::default(), 1, 0).unwrap();
        let pre = art.precoder.unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f_hat.csv");
        write_precoder_dump(&path, &pre, 0, art.record.seed).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "k,col,row,re,im");
        assert_eq!(data.len(), 1 + 8 * 4 * 2);
        let f: Vec<&str> = data[2].split(',').collect();
        assert_eq!(&f[..3], ["0", "0", "1"]);
        let re: f64 = f[3].parse().unwrap();
        assert_eq!(re, pre.f_hat_blocks[0][(1, 0)].re);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<ExportFormat>().unwrap(), ExportFormat::Json);
        assert_eq!("csv".parse::<ExportFormat>().unwrap(), ExportFormat::Csv);
        assert!("xml".parse::<ExportFormat>().is_err());
    }
}
