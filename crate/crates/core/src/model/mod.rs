//! Reduced-order electrochemical equivalent-circuit model (E-ECM).
//!
//! The terminal voltage is assembled from open-circuit potentials evaluated at
//! the particle surface concentrations, linearized Butler-Volmer kinetic
//! overpotentials, the electrolyte concentration potential and ohmic losses.
//! Solid and electrolyte diffusion enter as Padé-reduced transfer functions,
//! realized in discrete time by [`DiscreteStateSpace`].

mod kinetics;
mod ocv;
mod params;
mod profile;
mod simulate;
mod state_space;

pub use kinetics::{
    electrolyte_coefficient, exchange_current_density, kinetic_overpotential, ohmic_drop,
};
pub use ocv::OcvCurve;
pub use params::{Cell, CellParameters, ElectrodeParams, ParameterFile, FARADAY, GAS_CONSTANT};
pub use profile::{CurrentProfile, VoltageSeries};
pub use simulate::{simulate, simulate_detailed, LookupPolicy, SimulationTrace};
pub use state_space::{
    BlockOutputs, DiscreteStateSpace, ElectrolyteDiffusion, FirstOrderLag, Integrator,
    SolidDiffusion,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Electrode {
    Positive,
    Negative,
}

impl Electrode {
    pub const BOTH: [Electrode; 2] = [Electrode::Positive, Electrode::Negative];

    /// Orientation of the electrode reaction current relative to the cell
    /// current (positive = discharge). Discharge delithiates the negative
    /// electrode and lithiates the positive one.
    pub fn current_sign(self) -> f64 {
        match self {
            Electrode::Positive => -1.0,
            Electrode::Negative => 1.0,
        }
    }
}
