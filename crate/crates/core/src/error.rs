use std::path::PathBuf;

use crate::model::Electrode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid cell parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid OCV table: {0}")]
    InvalidOcv(String),

    #[error("stoichiometry {0} outside [0, 1]")]
    StoichiometryOutOfRange(f64),

    #[error("invalid current profile: {0}")]
    InvalidProfile(String),

    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("time step {dt} s exceeds a tenth of the fastest time constant ({tau_min} s)")]
    StepTooCoarse { dt: f64, tau_min: f64 },

    #[error("{electrode:?} concentration {value} mol/m^3 outside (0, {c_max})")]
    ConcentrationOutOfRange {
        electrode: Electrode,
        value: f64,
        c_max: f64,
    },

    #[error("exchange current density is zero")]
    DivisionByZero,

    #[error("simulation diverged at sample {index}: {source}")]
    SimulationDiverged {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the parameter box in dimension {dim}: {value}")]
    OutOfBox { dim: usize, value: f64 },

    #[error("invalid parameter box: {0}")]
    InvalidBox(String),

    #[error("kernel matrix not positive definite even with jitter {jitter}")]
    SingularKernel { jitter: f64 },

    #[error("observations {0} and {1} coincide")]
    DuplicatePoint(usize, usize),

    #[error("GP needs at least one observation")]
    EmptyData,

    #[error("negative posterior variance {0}")]
    NegativeVariance(f64),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("profile drives bulk stoichiometry of the {electrode:?} electrode to {value} at sample {index}")]
    SocWindowViolation {
        electrode: Electrode,
        value: f64,
        index: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid report: {0}")]
    InvalidReport(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by a bad configuration or input file rather
    /// than by a failure during computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameters(_)
                | Error::InvalidBox(_)
                | Error::InvalidConfig(_)
                | Error::NonPositiveStep(_)
                | Error::StepTooCoarse { .. }
                | Error::Json { .. }
        )
    }

    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidOcv(_)
                | Error::InvalidProfile(_)
                | Error::InvalidDataset(_)
                | Error::InvalidReport(_)
                | Error::Csv { .. }
                | Error::Io { .. }
                | Error::SocWindowViolation { .. }
        )
    }
}
