use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled applied current, A (positive = discharge).
///
/// Samples are point values at `t_k = k * dt`; between samples the current
/// is taken to vary linearly, so an interval carries the average of its two
/// end samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentProfile {
    dt: f64,
    samples: Vec<f64>,
}

impl CurrentProfile {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::NonPositiveStep(dt));
        }
        if samples.is_empty() {
            return Err(Error::InvalidProfile("empty current profile".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!("non-finite current at sample {i}")));
        }
        Ok(Self { dt, samples })
    }

    pub fn constant(dt: f64, len: usize, current: f64) -> Result<Self> {
        Self::new(dt, vec![current; len])
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.samples.len() - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |k| k as f64 * self.dt)
    }

    /// Trapezoidal charge throughput, A s.
    pub fn charge(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]) * self.dt)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dt: self.dt,
            samples: self.samples.iter().map(|i| i * factor).collect(),
        }
    }

    /// Resamples at `dt / factor` by linear interpolation. Sample `k` of the
    /// original lands on sample `k * factor` of the result.
    pub fn refine(&self, factor: usize) -> Self {
        assert!(factor >= 1, "refinement factor must be at least 1");
        let mut samples = Vec::with_capacity((self.samples.len() - 1) * factor + 1);
        for w in self.samples.windows(2) {
            for j in 0..factor {
                let s = j as f64 / factor as f64;
                samples.push(w[0] + (w[1] - w[0]) * s);
            }
        }
        samples.push(self.samples[self.samples.len() - 1]);
        Self {
            dt: self.dt / factor as f64,
            samples,
        }
    }
}

/// Terminal voltage time series, V.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageSeries {
    dt: f64,
    samples: Vec<f64>,
}

impl VoltageSeries {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::NonPositiveStep(dt));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!("non-finite voltage at sample {i}")));
        }
        Ok(Self { dt, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of squared differences, V^2.
    pub fn squared_error(&self, other: &VoltageSeries) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }
}
