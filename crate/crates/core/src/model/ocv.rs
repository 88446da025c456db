use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tabulated open-circuit potential versus surface stoichiometry,
/// linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct OcvCurve {
    x: Vec<f64>,
    u: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OcvRow {
    x: f64,
    #[serde(rename = "U_volts")]
    u_volts: f64,
}

/// Number of grid points in the built-in tables.
pub const SYNTHETIC_POINTS: usize = 201;

impl OcvCurve {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.len() != u.len() {
            return Err(Error::InvalidOcv(format!(
                "{} stoichiometry points but {} potentials",
                x.len(),
                u.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidOcv("need at least two points".into()));
        }
        if x.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::InvalidOcv("non-finite entry".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidOcv("stoichiometry grid not strictly increasing".into()));
        }
        if x[0] != 0.0 || x[x.len() - 1] != 1.0 {
            return Err(Error::InvalidOcv("stoichiometry grid must span [0, 1]".into()));
        }
        Ok(Self { x, u })
    }

    pub fn from_fn(points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = points.max(2) - 1;
        let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let u = x.iter().map(|&x| f(x)).collect();
        Self::new(x, u)
    }

    /// Smooth, strictly decreasing NMC-like cathode potential (4.40 V to 3.25 V).
    pub fn nmc_potential(x: f64) -> f64 {
        4.40 - 1.2 * x + 0.6 * x * x - 0.55 * x * x * x
    }

    /// Smooth, strictly decreasing graphite-like anode potential with a
    /// plateau step near half lithiation.
    pub fn graphite_potential(x: f64) -> f64 {
        0.08 + 0.9 * (-12.0 * x).exp() + 0.12 * (1.0 - x) - 0.03 * ((x - 0.5) / 0.05).tanh()
    }

    pub fn synthetic_nmc() -> Self {
        Self::from_fn(SYNTHETIC_POINTS, Self::nmc_potential).expect("valid generator")
    }

    pub fn synthetic_graphite() -> Self {
        Self::from_fn(SYNTHETIC_POINTS, Self::graphite_potential).expect("valid generator")
    }

    /// A flat curve; useful to isolate the dynamic part of the voltage.
    pub fn constant(u: f64) -> Self {
        Self::new(vec![0.0, 1.0], vec![u, u]).expect("valid constant curve")
    }

    pub fn stoichiometry(&self) -> &[f64] {
        &self.x
    }

    pub fn potentials(&self) -> &[f64] {
        &self.u
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::StoichiometryOutOfRange(x));
        }
        let i = self.x.partition_point(|&g| g <= x);
        if i == self.x.len() {
            return Ok(self.u[self.u.len() - 1]);
        }
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let (u0, u1) = (self.u[i - 1], self.u[i]);
        Ok(u0 + (u1 - u0) * (x - x0) / (x1 - x0))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let headers = reader.headers().map_err(|e| Error::csv(path, e))?;
        if headers != vec!["x", "U_volts"] {
            return Err(Error::InvalidOcv(format!(
                "{}: expected header `x,U_volts`",
                path.display()
            )));
        }
        let mut x = Vec::new();
        let mut u = Vec::new();
        for row in reader.deserialize::<OcvRow>() {
            let row = row.map_err(|e| Error::csv(path, e))?;
            x.push(row.x);
            u.push(row.u_volts);
        }
        Self::new(x, u)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        for (&x, &u) in self.x.iter().zip(&self.u) {
            writer
                .serialize(OcvRow { x, u_volts: u })
                .map_err(|e| Error::csv(path, e))?;
        }
        writer.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_linearly_between_nodes() {
        let c = OcvCurve::new(vec![0.0, 0.5, 1.0], vec![4.0, 3.0, 2.0]).unwrap();
        assert_eq!(c.eval(0.0).unwrap(), 4.0);
        assert_eq!(c.eval(0.5).unwrap(), 3.0);
        assert_eq!(c.eval(1.0).unwrap(), 2.0);
        assert!((c.eval(0.25).unwrap() - 3.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_query_is_error() {
        let c = OcvCurve::synthetic_nmc();
        assert!(matches!(c.eval(-1e-9), Err(Error::StoichiometryOutOfRange(_))));
        assert!(c.eval(1.0 + 1e-9).is_err());
        assert!(c.eval(f64::NAN).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(OcvCurve::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(OcvCurve::new(vec![0.1, 1.0], vec![1.0; 2]).is_err());
        assert!(OcvCurve::new(vec![0.0, 0.9], vec![1.0; 2]).is_err());
        assert!(OcvCurve::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn synthetic_tables_are_strictly_monotone() {
        for c in [OcvCurve::synthetic_nmc(), OcvCurve::synthetic_graphite()] {
            assert_eq!(c.stoichiometry().len(), SYNTHETIC_POINTS);
            assert!(c.potentials().windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn committed_tables_match_generators() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let p = OcvCurve::load_csv(dir.join("reference_cell_ocv_p.csv")).unwrap();
        let n = OcvCurve::load_csv(dir.join("reference_cell_ocv_n.csv")).unwrap();
        for (a, b) in [(p, OcvCurve::synthetic_nmc()), (n, OcvCurve::synthetic_graphite())] {
            assert_eq!(a.stoichiometry(), b.stoichiometry());
            for (ua, ub) in a.potentials().iter().zip(b.potentials()) {
                assert!((ua - ub).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ocv.csv");
        let c = OcvCurve::synthetic_graphite();
        c.save_csv(&path).unwrap();
        assert_eq!(OcvCurve::load_csv(&path).unwrap(), c);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,U_volts\n"));
    }
}
