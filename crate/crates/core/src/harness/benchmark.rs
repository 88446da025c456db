//! The train/test benchmark protocol and its report.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::dataset::{generate_synthetic_dataset, load_dataset};
use super::seeds::split_seed;
use super::stats::mean_variance;
use crate::baselines::{gradient_descent, pso};
use crate::bayes_opt::run_bo;
use crate::error::{Error, Result};
use crate::identification::{DatasetRole, IdentificationDataset, IdentificationProblem};
use crate::model::Cell;
use crate::optim::OptimizationResult;

/// Ground-truth cell plus the training and test data of one experiment.
#[derive(Debug, Clone)]
pub struct BenchmarkData {
    pub cell: Cell,
    pub train: IdentificationDataset,
    pub test: IdentificationDataset,
}

impl BenchmarkData {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        let cell = config.cell()?;
        let (train, test) = match &config.dataset {
            Some(manifest) => load_dataset(manifest)?,
            None => (
                generate_synthetic_dataset(
                    &cell,
                    DatasetRole::Train,
                    &config.train,
                    config.noise_sigma_v,
                    config.noise_seed,
                )?,
                generate_synthetic_dataset(
                    &cell,
                    DatasetRole::Test,
                    &config.test,
                    config.noise_sigma_v,
                    config.noise_seed.wrapping_add(1),
                )?,
            ),
        };
        if train.records.is_empty() || test.records.is_empty() {
            return Err(Error::InvalidDataset("train and test data must be non-empty".into()));
        }
        Ok(Self { cell, train, test })
    }

    pub fn train_problem(&self, config: &ExperimentConfig) -> Result<IdentificationProblem> {
        IdentificationProblem::new(self.cell.clone(), self.train.clone(), config.bounds.clone())
    }

    pub fn test_problem(&self, config: &ExperimentConfig) -> Result<IdentificationProblem> {
        IdentificationProblem::new(self.cell.clone(), self.test.clone(), config.bounds.clone())
    }
}

/// Runs one optimizer on `objective` with the experiment's budget.
pub fn run_method<F>(
    method: Method,
    config: &ExperimentConfig,
    objective: F,
    seed: u64,
) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let b = &config.bounds;
    match method {
        Method::Bo => run_bo(objective, b, &config.bo.run_config(config.budget, seed)),
        Method::Gd => gradient_descent(objective, b, &config.gd.run_config(config.budget, seed)),
        Method::Pso => pso(objective, b, &config.pso.run_config(config.budget, seed)),
    }
}

/// One method on one repetition. Timing lives in [`ReportTiming`] so that
/// this part of the report is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRow {
    pub method: Method,
    pub repetition: usize,
    pub seed: u64,
    pub failed: bool,
    #[serde(default)]
    pub error: Option<String>,
    pub train_loss: Option<f64>,
    pub test_loss: Option<f64>,
    pub best_theta: Option<Vec<f64>>,
    /// Evaluations reported by the optimizer.
    pub evaluations: usize,
    /// Calls of the training loss as counted by the loss itself.
    pub objective_calls: usize,
    /// Running minimum of the training loss.
    pub best_so_far: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSummary {
    pub method: Method,
    /// Successful repetitions entering the statistics.
    pub runs: usize,
    pub failures: usize,
    #[serde(with = "nan_as_null")]
    pub train_mean: f64,
    pub train_var: f64,
    #[serde(with = "nan_as_null")]
    pub test_mean: f64,
    pub test_var: f64,
}

/// The mean over zero successful runs is NaN, which JSON cannot carry.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSummary {
    pub method: Method,
    #[serde(with = "nan_as_null")]
    pub time_mean_s: f64,
    pub time_var_s2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportBody {
    pub config: ExperimentConfig,
    /// Method-major, in config order, repetitions ascending.
    pub rows: Vec<RunRow>,
    pub summary: Vec<MethodSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportTiming {
    /// Wall time of each row of the body, s.
    pub wall_time_s: Vec<f64>,
    pub summary: Vec<TimingSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkReport {
    pub body: ReportBody,
    pub timing: ReportTiming,
}

fn summarize(config: &ExperimentConfig, rows: &[RunRow], times: &[f64]) -> (Vec<MethodSummary>, Vec<TimingSummary>) {
    let mut summary = Vec::new();
    let mut timing = Vec::new();
    for &method in &config.methods {
        let ok: Vec<&RunRow> = rows.iter().filter(|r| r.method == method && !r.failed).collect();
        let train: Vec<f64> = ok.iter().filter_map(|r| r.train_loss).collect();
        let test: Vec<f64> = ok.iter().filter_map(|r| r.test_loss).collect();
        let (train_mean, train_var) = mean_variance(&train);
        let (test_mean, test_var) = mean_variance(&test);
        summary.push(MethodSummary {
            method,
            runs: ok.len(),
            failures: rows.iter().filter(|r| r.method == method && r.failed).count(),
            train_mean,
            train_var,
            test_mean,
            test_var,
        });
        let t: Vec<f64> = rows
            .iter()
            .zip(times)
            .filter(|(r, _)| r.method == method)
            .map(|(_, &t)| t)
            .collect();
        let (time_mean_s, time_var_s2) = mean_variance(&t);
        timing.push(TimingSummary {
            method,
            time_mean_s,
            time_var_s2,
        });
    }
    (summary, timing)
}

fn run_one(config: &ExperimentConfig, data: &BenchmarkData, method: Method, repetition: usize) -> (RunRow, f64) {
    let seed = split_seed(config.seed, repetition as u64);
    let start = Instant::now();
    let mut calls = 0;
    let outcome = (|| {
        let train = data.train_problem(config)?;
        let result = run_method(method, config, train.objective(), seed);
        calls = train.calls();
        let result = result?;
        let test = data.test_problem(config)?;
        let test_loss = test.loss(&result.best_theta)?.loss;
        Ok::<_, Error>((result, test_loss))
    })();
    let elapsed = start.elapsed().as_secs_f64();
    let row = match outcome {
        Ok((result, test_loss)) => RunRow {
            method,
            repetition,
            seed,
            failed: false,
            error: None,
            train_loss: Some(result.best_loss),
            test_loss: Some(test_loss),
            best_so_far: result.best_so_far(),
            best_theta: Some(result.best_theta),
            evaluations: result.evaluations,
            objective_calls: calls,
        },
        Err(e) => {
            log::warn!("{method} repetition {repetition} failed: {e}");
            RunRow {
                method,
                repetition,
                seed,
                failed: true,
                error: Some(e.to_string()),
                train_loss: None,
                test_loss: None,
                best_theta: None,
                evaluations: 0,
                objective_calls: calls,
                best_so_far: Vec::new(),
            }
        }
    };
    (row, elapsed)
}

/// Runs every method on every repetition, in parallel over runs.
///
/// All methods of repetition `r` share the seed `split_seed(config.seed, r)`
/// and therefore the starting point. Failed runs become flagged rows.
pub fn run_benchmark_with(config: &ExperimentConfig, data: &BenchmarkData) -> Result<BenchmarkReport> {
    config.validate()?;
    let jobs: Vec<(Method, usize)> = config
        .methods
        .iter()
        .flat_map(|&m| (0..config.repetitions).map(move |r| (m, r)))
        .collect();
    let results: Vec<(RunRow, f64)> = jobs
        .par_iter()
        .map(|&(m, r)| run_one(config, data, m, r))
        .collect();
    let (rows, wall_time_s): (Vec<RunRow>, Vec<f64>) = results.into_iter().unzip();
    let (summary, timing) = summarize(config, &rows, &wall_time_s);
    Ok(BenchmarkReport {
        body: ReportBody {
            config: config.clone(),
            rows,
            summary,
        },
        timing: ReportTiming {
            wall_time_s,
            summary: timing,
        },
    })
}

pub fn run_benchmark(config: &ExperimentConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let data = BenchmarkData::prepare(config)?;
    run_benchmark_with(config, &data)
}

fn close(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

impl BenchmarkReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.body.summary.iter().find(|s| s.method == method)
    }

    pub fn rows(&self, method: Method) -> impl Iterator<Item = &RunRow> {
        self.body.rows.iter().filter(move |r| r.method == method)
    }

    /// Serialized body; equal configs give equal bodies.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Row layout and aggregates must agree with the raw rows.
    pub fn check(&self) -> Result<()> {
        let c = &self.body.config;
        let rows = &self.body.rows;
        let bad = |msg: String| Err(Error::InvalidReport(msg));
        if rows.len() != c.methods.len() * c.repetitions {
            return bad(format!(
                "{} rows for {} methods x {} repetitions",
                rows.len(),
                c.methods.len(),
                c.repetitions
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            let (m, r) = (c.methods[i / c.repetitions], i % c.repetitions);
            if row.method != m || row.repetition != r {
                return bad(format!("row {i} is {} #{}, expected {m} #{r}", row.method, row.repetition));
            }
            if row.failed == row.test_loss.is_some() {
                return bad(format!("row {i}: failure flag disagrees with losses"));
            }
        }
        if self.timing.wall_time_s.len() != rows.len() {
            return bad("timing rows do not match report rows".into());
        }
        let (summary, timing) = summarize(c, rows, &self.timing.wall_time_s);
        if summary.len() != self.body.summary.len() || timing.len() != self.timing.summary.len() {
            return bad("summary does not cover the configured methods".into());
        }
        for (a, b) in summary.iter().zip(&self.body.summary) {
            let same = a.method == b.method
                && a.runs == b.runs
                && a.failures == b.failures
                && close(a.train_mean, b.train_mean)
                && close(a.train_var, b.train_var)
                && close(a.test_mean, b.test_mean)
                && close(a.test_var, b.test_var);
            if !same {
                return bad(format!("summary of {} does not match its rows", b.method));
            }
        }
        for (a, b) in timing.iter().zip(&self.timing.summary) {
            if a.method != b.method || !close(a.time_mean_s, b.time_mean_s) || !close(a.time_var_s2, b.time_var_s2) {
                return bad(format!("timing summary of {} does not match its rows", b.method));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    /// Loads a report and verifies it with [`BenchmarkReport::check`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let report: Self = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidReport(format!("{}: {e}", path.display())))?;
        report.check()?;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ProfileSpec;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            budget: 12,
            repetitions: 2,
            train: vec![ProfileSpec::rcid("rcid", 600.0)],
            test: vec![ProfileSpec::drive_cycle("drive", 300.0, 1)],
            ..Default::default()
        }
    }

    #[test]
    fn rows_cover_methods_and_repetitions() {
        let r = run_benchmark(&small()).unwrap();
        assert_eq!(r.body.rows.len(), 6);
        r.check().unwrap();
        for row in &r.body.rows {
            assert!(!row.failed);
            assert_eq!(row.evaluations, 12);
            assert_eq!(row.objective_calls, 12);
            assert_eq!(row.seed, split_seed(0, row.repetition as u64));
        }
    }

    #[test]
    fn tampered_summary_fails_check() {
        let mut r = run_benchmark(&small()).unwrap();
        r.body.summary[1].test_mean *= 1.01;
        assert!(matches!(r.check(), Err(Error::InvalidReport(_))));
        let mut r = run_benchmark(&small()).unwrap();
        r.body.rows.pop();
        assert!(r.check().is_err());
    }

    #[test]
    fn failed_rows_are_kept_and_excluded() {
        let mut r = run_benchmark(&small()).unwrap();
        let row = &mut r.body.rows[0];
        row.failed = true;
        row.error = Some("boom".into());
        row.train_loss = None;
        row.test_loss = None;
        assert!(r.check().is_err());
        let (summary, timing) = summarize(&r.body.config, &r.body.rows, &r.timing.wall_time_s);
        r.body.summary = summary;
        r.timing.summary = timing;
        r.check().unwrap();
        assert_eq!(r.body.summary[0].runs, 1);
        assert_eq!(r.body.summary[0].failures, 1);
    }

    #[test]
    fn json_round_trip_with_nan_mean() {
        let mut r = run_benchmark(&small()).unwrap();
        for row in r.body.rows.iter_mut().take(2) {
            row.failed = true;
            row.train_loss = None;
            row.test_loss = None;
        }
        let (summary, timing) = summarize(&r.body.config, &r.body.rows, &r.timing.wall_time_s);
        r.body.summary = summary;
        r.timing.summary = timing;
        assert!(r.body.summary[0].test_mean.is_nan());
        let back: BenchmarkReport = serde_json::from_str(&r.to_json()).unwrap();
        back.check().unwrap();
        assert_eq!(back.body_json(), r.body_json());
    }
}
