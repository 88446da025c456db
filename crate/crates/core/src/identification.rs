//! Parameter space and least-squares identification objective.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{simulate, Cell, CurrentProfile, VoltageSeries};

/// Loss assigned to parameter sets the model cannot simulate, V^2.
pub const PENALTY_LOSS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDimension {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    /// Map this dimension to the unit interval in log space.
    #[serde(default)]
    pub log_scale: bool,
}

/// Axis-aligned box of admissible parameters, with an affine (or per-axis
/// logarithmic) map onto the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterBox {
    dims: Vec<BoxDimension>,
}

impl ParameterBox {
    pub fn new(dims: Vec<BoxDimension>) -> Result<Self> {
        let b = Self { dims };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidBox("no dimensions".into()));
        }
        for d in &self.dims {
            if !(d.lower.is_finite() && d.upper.is_finite() && d.lower < d.upper) {
                return Err(Error::InvalidBox(format!(
                    "{}: need finite lower < upper, got [{}, {}]",
                    d.name, d.lower, d.upper
                )));
            }
            if d.log_scale && d.lower <= 0.0 {
                return Err(Error::InvalidBox(format!(
                    "{}: log-scaled bounds must be positive",
                    d.name
                )));
            }
        }
        Ok(())
    }

    /// Linear box over (k_p, k_n, D_e) from per-parameter bounds.
    pub fn kinetic_electrolyte(k_p: (f64, f64), k_n: (f64, f64), d_e: (f64, f64)) -> Result<Self> {
        let dim = |name: &str, (lower, upper): (f64, f64)| BoxDimension {
            name: name.into(),
            lower,
            upper,
            log_scale: false,
        };
        Self::new(vec![dim("k_p", k_p), dim("k_n", k_n), dim("D_e", d_e)])
    }

    /// Default search box around [`crate::model::CellParameters::reference`].
    ///
    /// The rate constants act through charge-transfer resistances that scale
    /// as `1/k`, so they are searched in log-space; `D_e` stays linear.
    pub fn reference() -> Self {
        Self::kinetic_electrolyte((0.8e-11, 4.0e-11), (0.4e-11, 2.4e-11), (0.6e-10, 3.0e-10))
            .and_then(|b| b.with_log_scale("k_p"))
            .and_then(|b| b.with_log_scale("k_n"))
            .expect("valid reference box")
    }

    pub fn unit_cube(n: usize) -> Self {
        Self::new(
            (0..n)
                .map(|i| BoxDimension {
                    name: format!("x{i}"),
                    lower: 0.0,
                    upper: 1.0,
                    log_scale: false,
                })
                .collect(),
        )
        .expect("valid unit cube")
    }

    pub fn with_log_scale(mut self, name: &str) -> Result<Self> {
        let d = self
            .dims
            .iter_mut()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::InvalidBox(format!("no dimension named {name}")))?;
        d.log_scale = true;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dimensions(&self) -> &[BoxDimension] {
        &self.dims
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.dims.iter().map(|d| d.name.as_str())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.dims.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                got: len,
            })
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dims.len()
            && theta
                .iter()
                .zip(&self.dims)
                .all(|(&v, d)| v >= d.lower && v <= d.upper)
    }

    /// Physical coordinates to the unit cube; errors outside the box.
    pub fn normalize(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta.len())?;
        theta
            .iter()
            .zip(&self.dims)
            .enumerate()
            .map(|(i, (&v, d))| {
                if !(v >= d.lower && v <= d.upper) {
                    return Err(Error::OutOfBox { dim: i, value: v });
                }
                Ok(if d.log_scale {
                    (v.ln() - d.lower.ln()) / (d.upper.ln() - d.lower.ln())
                } else {
                    (v - d.lower) / (d.upper - d.lower)
                }
                .clamp(0.0, 1.0))
            })
            .collect()
    }

    /// Unit cube to physical coordinates; errors outside `[0, 1]^n`.
    pub fn denormalize(&self, unit: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(unit.len())?;
        unit.iter()
            .zip(&self.dims)
            .enumerate()
            .map(|(i, (&u, d))| {
                if !(0.0..=1.0).contains(&u) {
                    return Err(Error::OutOfBox { dim: i, value: u });
                }
                Ok(if d.log_scale {
                    (d.lower.ln() + u * (d.upper.ln() - d.lower.ln())).exp()
                } else {
                    d.lower + u * (d.upper - d.lower)
                }
                .clamp(d.lower, d.upper))
            })
            .collect()
    }

    pub fn clamp_unit(unit: &mut [f64]) {
        for u in unit {
            *u = u.clamp(0.0, 1.0);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetRole {
    Train,
    Test,
}

/// One excitation profile and the voltage measured in response to it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRecord {
    pub name: String,
    pub current: CurrentProfile,
    pub voltage: VoltageSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationDataset {
    pub role: DatasetRole,
    pub records: Vec<ProfileRecord>,
    /// Ground-truth (k_p, k_n, D_e) when the data is synthetic.
    pub truth: Option<Vec<f64>>,
}

impl IdentificationDataset {
    pub fn new(role: DatasetRole, records: Vec<ProfileRecord>) -> Result<Self> {
        let d = Self {
            role,
            records,
            truth: None,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.records {
            if r.current.len() != r.voltage.len() {
                return Err(Error::InvalidDataset(format!(
                    "{}: {} current samples but {} voltage samples",
                    r.name,
                    r.current.len(),
                    r.voltage.len()
                )));
            }
            if r.current.dt() != r.voltage.dt() {
                return Err(Error::InvalidDataset(format!("{}: sample periods differ", r.name)));
            }
        }
        Ok(())
    }

    /// Subset holding only the named records (order preserved).
    pub fn subset(&self, names: &[&str]) -> Self {
        Self {
            role: self.role,
            records: self
                .records
                .iter()
                .filter(|r| names.contains(&r.name.as_str()))
                .cloned()
                .collect(),
            truth: self.truth.clone(),
        }
    }

    pub fn total_samples(&self) -> usize {
        self.records.iter().map(|r| r.current.len()).sum()
    }
}

/// One call of the identification loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveEvaluation {
    pub theta: Vec<f64>,
    pub loss: f64,
    pub per_profile: Vec<f64>,
    pub index: usize,
    #[serde(with = "crate::serde_secs")]
    pub wall_time: Duration,
    /// The model could not be simulated; `loss` is the penalty.
    pub penalized: bool,
}

/// Sum over profiles and samples of squared voltage error for a candidate
/// (k_p, k_n, D_e), all other cell parameters held fixed.
#[derive(Debug)]
pub struct IdentificationProblem {
    pub cell: Cell,
    pub dataset: IdentificationDataset,
    pub bounds: ParameterBox,
    calls: AtomicUsize,
}

impl IdentificationProblem {
    pub fn new(cell: Cell, dataset: IdentificationDataset, bounds: ParameterBox) -> Result<Self> {
        if bounds.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: bounds.dim(),
            });
        }
        dataset.validate()?;
        Ok(Self {
            cell,
            dataset,
            bounds,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn loss(&self, theta: &[f64]) -> Result<ObjectiveEvaluation> {
        if theta.len() != self.bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.bounds.dim(),
                got: theta.len(),
            });
        }
        let index = self.calls.fetch_add(1, Ordering::Relaxed);
        let start = Instant::now();
        let params = self.cell.params.with_theta(theta)?;
        let mut per_profile = Vec::with_capacity(self.dataset.records.len());
        let mut penalized = false;
        for r in &self.dataset.records {
            match simulate(&params, &self.cell.ocv_p, &self.cell.ocv_n, &r.current) {
                Ok(v) => per_profile.push(v.squared_error(&r.voltage)?),
                Err(Error::SimulationDiverged { .. }) => {
                    penalized = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let loss = if penalized {
            per_profile.clear();
            PENALTY_LOSS
        } else {
            per_profile.iter().sum()
        };
        Ok(ObjectiveEvaluation {
            theta: theta.to_vec(),
            loss,
            per_profile,
            index,
            wall_time: start.elapsed(),
            penalized,
        })
    }

    /// Loss as a plain objective over physical parameters.
    pub fn objective(&self) -> impl FnMut(&[f64]) -> Result<f64> + '_ {
        move |theta| self.loss(theta).map(|e| e.loss)
    }
}
