//! Types shared by all optimizers: budgeted evaluation, traces and results.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identification::ParameterBox;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    /// Physical coordinates.
    pub theta: Vec<f64>,
    /// Unit-cube coordinates.
    pub unit: Vec<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_theta: Vec<f64>,
    pub best_unit: Vec<f64>,
    pub best_loss: f64,
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
    #[serde(with = "crate::serde_secs")]
    pub wall_time: Duration,
}

impl OptimizationResult {
    /// Running minimum of the loss, one entry per evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |best, e| {
                *best = best.min(e.loss);
                Some(*best)
            })
            .collect()
    }

    /// Writes `eval_index,<dim names>,loss_V2,cum_best_V2`.
    pub fn write_trace_csv(&self, bounds: &ParameterBox, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut header = vec!["eval_index".to_string()];
        header.extend(bounds.names().map(String::from));
        header.push("loss_V2".into());
        header.push("cum_best_V2".into());
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for (e, best) in self.trace.iter().zip(self.best_so_far()) {
            let mut row = vec![e.index.to_string()];
            row.extend(e.theta.iter().map(|v| format!("{v:e}")));
            row.push(format!("{:e}", e.loss));
            row.push(format!("{best:e}"));
            w.write_record(&row).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Uniform random point in the unit cube. Every optimizer draws its starting
/// point this way from a freshly seeded generator, so equal seeds give equal
/// starts across methods.
pub fn start_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

/// Wraps an objective over physical coordinates with a hard evaluation
/// budget, recording every call.
pub(crate) struct Recorder<'a, F> {
    objective: F,
    bounds: &'a ParameterBox,
    budget: usize,
    trace: Vec<TraceEntry>,
    best: Option<usize>,
    started: Instant,
}

impl<'a, F> Recorder<'a, F>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    pub fn new(objective: F, bounds: &'a ParameterBox, budget: usize) -> Self {
        Self {
            objective,
            bounds,
            budget,
            trace: Vec::with_capacity(budget),
            best: None,
            started: Instant::now(),
        }
    }

    pub fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn best_unit(&self) -> Option<&[f64]> {
        self.best.map(|i| self.trace[i].unit.as_slice())
    }

    /// Evaluates the objective at a unit-cube point.
    pub fn eval(&mut self, unit: &[f64]) -> Result<f64> {
        assert!(self.trace.len() < self.budget, "evaluation budget exceeded");
        let theta = self.bounds.denormalize(unit)?;
        let loss = (self.objective)(&theta)?;
        let index = self.trace.len();
        if self.best.is_none_or(|b| loss < self.trace[b].loss) {
            self.best = Some(index);
        }
        self.trace.push(TraceEntry {
            index,
            theta,
            unit: unit.to_vec(),
            loss,
        });
        Ok(loss)
    }

    pub fn finish(self) -> Result<OptimizationResult> {
        let best = self
            .best
            .ok_or_else(|| Error::InvalidConfig("no evaluations performed".into()))?;
        let b = &self.trace[best];
        Ok(OptimizationResult {
            best_theta: b.theta.clone(),
            best_unit: b.unit.clone(),
            best_loss: b.loss,
            evaluations: self.trace.len(),
            wall_time: self.started.elapsed(),
            trace: self.trace,
        })
    }
}
