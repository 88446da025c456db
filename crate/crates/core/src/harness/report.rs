//! Plot-ready exports of a benchmark report.

use std::fs;
use std::path::{Path, PathBuf};

use super::benchmark::{BenchmarkData, BenchmarkReport};
use crate::error::{Error, Result};
use crate::identification::ProfileRecord;
use crate::model::simulate;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const REPORT_FILE: &str = "report.json";
pub const BOXPLOT_FILE: &str = "boxplot.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const TRACES_DIR: &str = "traces";

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

fn fmt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// One row per method: time, training-loss and test-loss mean and variance.
pub fn write_summary_csv(report: &BenchmarkReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let header = [
        "method",
        "time_mean_s",
        "time_var_s2",
        "train_mean_V2",
        "train_var_V4",
        "test_mean_V2",
        "test_var_V4",
    ];
    w.write_record(header).map_err(|e| Error::csv(path, e))?;
    for (s, t) in report.body.summary.iter().zip(&report.timing.summary) {
        let nums = [t.time_mean_s, t.time_var_s2, s.train_mean, s.train_var, s.test_mean, s.test_var];
        let mut row = vec![s.method.to_string()];
        row.extend(nums.iter().map(|&v| fmt((!v.is_nan()).then_some(v))));
        w.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per method and repetition.
pub fn write_boxplot_csv(report: &BenchmarkReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let mut header: Vec<String> = [
        "method",
        "repetition",
        "seed",
        "failed",
        "train_loss_V2",
        "test_loss_V2",
        "wall_time_s",
        "evaluations",
        "objective_calls",
    ]
    .map(String::from)
    .to_vec();
    header.extend(report.body.config.bounds.names().map(String::from));
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    let dim = report.body.config.bounds.dim();
    for (r, t) in report.body.rows.iter().zip(&report.timing.wall_time_s) {
        let mut row = vec![
            r.method.to_string(),
            r.repetition.to_string(),
            r.seed.to_string(),
            r.failed.to_string(),
            fmt(r.train_loss),
            fmt(r.test_loss),
            format!("{t:e}"),
            r.evaluations.to_string(),
            r.objective_calls.to_string(),
        ];
        match &r.best_theta {
            Some(theta) => row.extend(theta.iter().map(|v| format!("{v:e}"))),
            None => row.extend(std::iter::repeat_n(String::new(), dim)),
        }
        w.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_convergence_csv(report: &BenchmarkReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["method", "repetition", "eval_index", "cum_best_V2"])
        .map_err(|e| Error::csv(path, e))?;
    for r in &report.body.rows {
        for (i, v) in r.best_so_far.iter().enumerate() {
            w.write_record([r.method.to_string(), r.repetition.to_string(), i.to_string(), format!("{v:e}")])
                .map_err(|e| Error::csv(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Measured and simulated voltage of `theta` on one profile.
pub fn write_voltage_error_csv(
    data: &BenchmarkData,
    record: &ProfileRecord,
    theta: &[f64],
    path: &Path,
) -> Result<()> {
    let params = data.cell.params.with_theta(theta)?;
    let sim = simulate(&params, &data.cell.ocv_p, &data.cell.ocv_n, &record.current)?;
    let mut w = writer(path)?;
    w.write_record(["time_s", "current_A", "measured_V", "simulated_V", "error_V"])
        .map_err(|e| Error::csv(path, e))?;
    for (((t, i), m), s) in record
        .current
        .times()
        .zip(record.current.samples())
        .zip(record.voltage.samples())
        .zip(sim.samples())
    {
        w.write_record([t.to_string(), i.to_string(), m.to_string(), s.to_string(), (s - m).to_string()])
            .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the summary table, the full JSON report, the box-plot rows, the
/// convergence curves and, for every successful run, the voltage error on
/// each training and test profile. Returns the files written.
pub fn export_report(report: &BenchmarkReport, data: &BenchmarkData, out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out.as_ref();
    let traces = out.join(TRACES_DIR);
    fs::create_dir_all(&traces).map_err(|e| Error::io(&traces, e))?;
    let mut written = Vec::new();
    let summary = out.join(SUMMARY_FILE);
    write_summary_csv(report, &summary)?;
    written.push(summary);
    let json = out.join(REPORT_FILE);
    report.save(&json)?;
    written.push(json);
    let boxplot = out.join(BOXPLOT_FILE);
    write_boxplot_csv(report, &boxplot)?;
    written.push(boxplot);
    let convergence = out.join(CONVERGENCE_FILE);
    write_convergence_csv(report, &convergence)?;
    written.push(convergence);
    for row in &report.body.rows {
        let Some(theta) = &row.best_theta else { continue };
        for (role, dataset) in [("train", &data.train), ("test", &data.test)] {
            for record in &dataset.records {
                let path = traces.join(format!(
                    "{}_rep{:02}_{role}_{}.csv",
                    row.method, row.repetition, record.name
                ));
                match write_voltage_error_csv(data, record, theta, &path) {
                    Ok(()) => written.push(path),
                    Err(Error::SimulationDiverged { .. }) => {
                        log::warn!("{}: best parameters do not simulate; trace skipped", path.display())
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(written)
}
