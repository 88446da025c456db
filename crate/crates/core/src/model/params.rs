use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Electrode, OcvCurve};
use crate::error::{Error, Result};

/// Faraday constant, C/mol.
pub const FARADAY: f64 = 96_485.332_12;
/// Universal gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

fn default_faraday() -> f64 {
    FARADAY
}

fn default_gas_constant() -> f64 {
    GAS_CONSTANT
}

/// Physical constants of the cell plus the three identified parameters
/// (`k_p`, `k_n`, `d_e`). All quantities are SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellParameters {
    /// Cathode reaction rate constant.
    pub k_p: f64,
    /// Anode reaction rate constant.
    pub k_n: f64,
    /// Electrolyte diffusion coefficient, m^2/s.
    pub d_e: f64,

    pub r_p: f64,
    pub r_n: f64,
    pub d_p: f64,
    pub d_n: f64,
    pub eps_am_p: f64,
    pub eps_am_n: f64,
    pub l_p: f64,
    pub l_n: f64,
    pub l_cell: f64,
    /// Geometric electrode area A, m^2.
    pub area: f64,
    /// Area A_s entering the electrolyte coefficient, m^2.
    pub area_s: f64,
    pub c_max_p: f64,
    pub c_max_n: f64,
    pub c_p0: f64,
    pub c_n0: f64,
    pub c_e0: f64,
    /// Electrolyte concentration seen by the cathode kinetics; `c_e0` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_e_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_e_n: Option<f64>,
    pub t_plus: f64,
    pub beta: f64,
    pub gamma_p: f64,
    pub gamma_n: f64,
    /// Ionic conductivity, S/m (constant).
    pub kappa: f64,
    /// Contact resistance, ohm.
    pub r_c: f64,
    pub t0: f64,
    pub t_ref: f64,
    /// Cell temperature used in the Arrhenius factor, K.
    pub t_cell: f64,
    pub e_io_p: f64,
    pub e_io_n: f64,
    /// Current-to-flux factor, 1/m^2. Defaults to `R_i / (3 eps_i L_i A)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_n: Option<f64>,
    #[serde(default = "default_faraday")]
    pub faraday: f64,
    #[serde(default = "default_gas_constant")]
    pub r_gas: f64,
}

/// Per-electrode view of [`CellParameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectrodeParams {
    pub rate_constant: f64,
    pub radius: f64,
    pub diffusivity: f64,
    pub eps_am: f64,
    pub thickness: f64,
    pub c_max: f64,
    pub c_init: f64,
    pub c_e: f64,
    pub activation_energy: f64,
    pub flux_factor: f64,
}

impl ElectrodeParams {
    /// Solid diffusion time constant `R^2 / (35 D)`, s.
    pub fn diffusion_time_constant(&self) -> f64 {
        self.radius * self.radius / (35.0 * self.diffusivity)
    }
}

impl CellParameters {
    /// A moderately sized NMC/graphite pouch cell (about 3 Ah) used as
    /// ground truth for the synthetic benchmark.
    pub fn reference() -> Self {
        Self {
            k_p: 2.0e-11,
            k_n: 1.0e-11,
            d_e: 1.5e-10,
            r_p: 5.0e-6,
            r_n: 5.0e-6,
            d_p: 1.0e-14,
            d_n: 3.0e-14,
            eps_am_p: 0.5,
            eps_am_n: 0.55,
            l_p: 70.0e-6,
            l_n: 80.0e-6,
            l_cell: 200.0e-6,
            area: 0.1,
            area_s: 0.1,
            c_max_p: 51_000.0,
            c_max_n: 30_500.0,
            c_p0: 0.40 * 51_000.0,
            c_n0: 0.88 * 30_500.0,
            c_e0: 1000.0,
            c_e_p: None,
            c_e_n: None,
            t_plus: 0.38,
            beta: 0.5,
            gamma_p: 3.0,
            gamma_n: 3.0,
            kappa: 1.0,
            r_c: 0.005,
            t0: 298.15,
            t_ref: 298.15,
            t_cell: 298.15,
            e_io_p: 30_000.0,
            e_io_n: 30_000.0,
            j_p: None,
            j_n: None,
            faraday: FARADAY,
            r_gas: GAS_CONSTANT,
        }
    }

    pub fn electrode(&self, electrode: Electrode) -> ElectrodeParams {
        let (k, r, d, eps, l, c_max, c0, c_e, e_io, j) = match electrode {
            Electrode::Positive => (
                self.k_p, self.r_p, self.d_p, self.eps_am_p, self.l_p, self.c_max_p, self.c_p0,
                self.c_e_p, self.e_io_p, self.j_p,
            ),
            Electrode::Negative => (
                self.k_n, self.r_n, self.d_n, self.eps_am_n, self.l_n, self.c_max_n, self.c_n0,
                self.c_e_n, self.e_io_n, self.j_n,
            ),
        };
        ElectrodeParams {
            rate_constant: k,
            radius: r,
            diffusivity: d,
            eps_am: eps,
            thickness: l,
            c_max,
            c_init: c0,
            c_e: c_e.unwrap_or(self.c_e0),
            activation_energy: e_io,
            // J = 1 / (a_s L A) with specific area a_s = 3 eps / R.
            flux_factor: j.unwrap_or(r / (3.0 * eps * l * self.area)),
        }
    }

    /// Time constants of the electrolyte blocks (positive, negative), s.
    pub fn electrolyte_time_constants(&self) -> (f64, f64) {
        let l2 = self.l_cell * self.l_cell;
        (0.1052 * l2 / self.d_e, 0.0997 * l2 / self.d_e)
    }

    /// Fastest time constant among the discretized lag blocks.
    pub fn min_time_constant(&self) -> f64 {
        let (tau_pos, tau_neg) = self.electrolyte_time_constants();
        Electrode::BOTH
            .iter()
            .map(|&e| self.electrode(e).diffusion_time_constant())
            .fold(tau_pos.min(tau_neg), f64::min)
    }

    /// Charge, in coulombs, that moves an electrode's bulk stoichiometry by one.
    pub fn stoichiometric_charge(&self, electrode: Electrode) -> f64 {
        let e = self.electrode(electrode);
        self.faraday * e.eps_am * e.thickness * self.area * e.c_max
    }

    pub fn theta(&self) -> [f64; 3] {
        [self.k_p, self.k_n, self.d_e]
    }

    /// Copy with the identified parameters replaced.
    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        if theta.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: theta.len(),
            });
        }
        let mut p = self.clone();
        p.k_p = theta[0];
        p.k_n = theta[1];
        p.d_e = theta[2];
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k_p", self.k_p),
            ("k_n", self.k_n),
            ("d_e", self.d_e),
            ("r_p", self.r_p),
            ("r_n", self.r_n),
            ("d_p", self.d_p),
            ("d_n", self.d_n),
            ("l_p", self.l_p),
            ("l_n", self.l_n),
            ("l_cell", self.l_cell),
            ("area", self.area),
            ("area_s", self.area_s),
            ("c_max_p", self.c_max_p),
            ("c_max_n", self.c_max_n),
            ("c_p0", self.c_p0),
            ("c_n0", self.c_n0),
            ("c_e0", self.c_e0),
            ("kappa", self.kappa),
            ("t0", self.t0),
            ("t_ref", self.t_ref),
            ("t_cell", self.t_cell),
            ("faraday", self.faraday),
            ("r_gas", self.r_gas),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameters(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let optional_positive = [
            ("c_e_p", self.c_e_p),
            ("c_e_n", self.c_e_n),
            ("j_p", self.j_p),
            ("j_n", self.j_n),
        ];
        for (name, v) in optional_positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidParameters(format!(
                        "{name} must be positive and finite, got {v}"
                    )));
                }
            }
        }
        let finite = [
            ("beta", self.beta),
            ("gamma_p", self.gamma_p),
            ("gamma_n", self.gamma_n),
            ("r_c", self.r_c),
            ("e_io_p", self.e_io_p),
            ("e_io_n", self.e_io_n),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameters(format!("{name} is not finite")));
            }
        }
        if self.r_c < 0.0 {
            return Err(Error::InvalidParameters("r_c must be non-negative".into()));
        }
        for (name, v) in [("eps_am_p", self.eps_am_p), ("eps_am_n", self.eps_am_n)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameters(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        if !(self.t_plus > 0.0 && self.t_plus < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "t_plus must lie in (0, 1), got {}",
                self.t_plus
            )));
        }
        if self.c_p0 >= self.c_max_p {
            return Err(Error::InvalidParameters("c_p0 must be below c_max_p".into()));
        }
        if self.c_n0 >= self.c_max_n {
            return Err(Error::InvalidParameters("c_n0 must be below c_max_n".into()));
        }
        Ok(())
    }
}

/// On-disk parameter document: the flat [`CellParameters`] keys plus the
/// paths of the two OCV tables (relative paths resolve against the file).
#[derive(Debug, Clone, Serialize)]
pub struct ParameterFile {
    pub ocv_p_path: PathBuf,
    pub ocv_n_path: PathBuf,
    #[serde(flatten)]
    pub params: CellParameters,
}

impl ParameterFile {
    /// Parses the document, rejecting unknown keys.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        use serde::de::Error as _;
        let mut map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text)?;
        let mut take_path = |key: &str| -> serde_json::Result<PathBuf> {
            let v = map
                .remove(key)
                .ok_or_else(|| serde_json::Error::missing_field("ocv path"))?;
            serde_json::from_value(v)
        };
        let ocv_p_path = take_path("ocv_p_path")?;
        let ocv_n_path = take_path("ocv_n_path")?;
        let params = serde_json::from_value(serde_json::Value::Object(map))?;
        Ok(Self {
            ocv_p_path,
            ocv_n_path,
            params,
        })
    }
}

/// A parameterized cell: physical constants plus both OCV curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub params: CellParameters,
    pub ocv_p: OcvCurve,
    pub ocv_n: OcvCurve,
}

impl Cell {
    pub fn new(params: CellParameters, ocv_p: OcvCurve, ocv_n: OcvCurve) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            ocv_p,
            ocv_n,
        })
    }

    /// Reference parameters with the built-in synthetic OCV tables.
    pub fn reference() -> Self {
        Self {
            params: CellParameters::reference(),
            ocv_p: OcvCurve::synthetic_nmc(),
            ocv_n: OcvCurve::synthetic_graphite(),
        }
    }

    pub fn ocv(&self, electrode: Electrode) -> &OcvCurve {
        match electrode {
            Electrode::Positive => &self.ocv_p,
            Electrode::Negative => &self.ocv_n,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file = ParameterFile::from_json(&text).map_err(|e| Error::json(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let ocv_p = OcvCurve::load_csv(base.join(&file.ocv_p_path))?;
        let ocv_n = OcvCurve::load_csv(base.join(&file.ocv_n_path))?;
        Self::new(file.params, ocv_p, ocv_n)
    }

    /// Writes the parameter document and both OCV tables into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, name: &str) -> Result<PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let ocv_p_path = PathBuf::from(format!("{name}_ocv_p.csv"));
        let ocv_n_path = PathBuf::from(format!("{name}_ocv_n.csv"));
        self.ocv_p.save_csv(dir.join(&ocv_p_path))?;
        self.ocv_n.save_csv(dir.join(&ocv_n_path))?;
        let file = ParameterFile {
            ocv_p_path,
            ocv_n_path,
            params: self.params.clone(),
        };
        let path = dir.join(format!("{name}.json"));
        let text = serde_json::to_string_pretty(&file).map_err(|e| Error::json(&path, e))?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
