use super::{
    exchange_current_density, kinetic_overpotential, ohmic_drop, CellParameters, CurrentProfile,
    DiscreteStateSpace, Electrode, OcvCurve, VoltageSeries,
};
use crate::error::{Error, Result};

/// How concentration-dependent lookups are evaluated during simulation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LookupPolicy {
    /// OCV and exchange current follow the simulated surface concentration.
    #[default]
    Live,
    /// OCV and exchange current stay at their initial-state values, which
    /// makes `V - OCV` exactly linear in the current.
    FrozenAtInitial,
}

/// Per-sample internal signals of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub voltage: VoltageSeries,
    pub ocv: Vec<f64>,
    pub surface_p: Vec<f64>,
    pub surface_n: Vec<f64>,
    pub bulk_p: Vec<f64>,
    pub bulk_n: Vec<f64>,
    pub phi_e: Vec<f64>,
}

/// Terminal voltage of the cell for the given current profile.
pub fn simulate(
    params: &CellParameters,
    ocv_p: &OcvCurve,
    ocv_n: &OcvCurve,
    profile: &CurrentProfile,
) -> Result<VoltageSeries> {
    simulate_detailed(params, ocv_p, ocv_n, profile, LookupPolicy::Live).map(|t| t.voltage)
}

pub fn simulate_detailed(
    params: &CellParameters,
    ocv_p: &OcvCurve,
    ocv_n: &OcvCurve,
    profile: &CurrentProfile,
    policy: LookupPolicy,
) -> Result<SimulationTrace> {
    let diverged = |index, source| Error::SimulationDiverged {
        index,
        source: Box::new(source),
    };
    let mut model = DiscreteStateSpace::new(params, profile.dt()).map_err(|e| diverged(0, e))?;

    let n = profile.len();
    let mut trace = SimulationTrace {
        voltage: VoltageSeries::new(profile.dt(), Vec::new())?,
        ocv: Vec::with_capacity(n),
        surface_p: Vec::with_capacity(n),
        surface_n: Vec::with_capacity(n),
        bulk_p: Vec::with_capacity(n),
        bulk_n: Vec::with_capacity(n),
        phi_e: Vec::with_capacity(n),
    };
    let mut voltage = Vec::with_capacity(n);
    let initial = model.outputs();

    for (k, &current) in profile.samples().iter().enumerate() {
        let out = model.step(current);
        let mut ocv = 0.0;
        let mut kinetic = 0.0;
        for electrode in Electrode::BOTH {
            let e = params.electrode(electrode);
            let c = out.surface(electrode);
            if !(c > 0.0 && c < e.c_max) {
                return Err(diverged(
                    k,
                    Error::ConcentrationOutOfRange {
                        electrode,
                        value: c,
                        c_max: e.c_max,
                    },
                ));
            }
            let c_lookup = match policy {
                LookupPolicy::Live => c,
                LookupPolicy::FrozenAtInitial => initial.surface(electrode),
            };
            let curve = match electrode {
                Electrode::Positive => ocv_p,
                Electrode::Negative => ocv_n,
            };
            let u = curve.eval(c_lookup / e.c_max).map_err(|err| diverged(k, err))?;
            let i0 = exchange_current_density(params, electrode, c_lookup, params.t_cell)
                .map_err(|err| diverged(k, err))?;
            let eta = kinetic_overpotential(params, electrode, electrode.current_sign() * current, i0)
                .map_err(|err| diverged(k, err))?;
            // V = U_p - U_n - (eta_p - eta_n) + ...
            match electrode {
                Electrode::Positive => {
                    ocv += u;
                    kinetic -= eta;
                }
                Electrode::Negative => {
                    ocv -= u;
                    kinetic += eta;
                }
            }
        }
        let v = ocv + kinetic + out.phi_e + ohmic_drop(params, current) - current * params.r_c;
        if !v.is_finite() {
            return Err(diverged(
                k,
                Error::InvalidProfile(format!("non-finite voltage {v}")),
            ));
        }
        voltage.push(v);
        trace.ocv.push(ocv);
        trace.surface_p.push(out.surface_p);
        trace.surface_n.push(out.surface_n);
        trace.bulk_p.push(out.bulk_p);
        trace.bulk_n.push(out.bulk_n);
        trace.phi_e.push(out.phi_e);
    }
    trace.voltage = VoltageSeries::new(profile.dt(), voltage)?;
    Ok(trace)
}
