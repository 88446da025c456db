//! Discrete-time realization of the diffusion transfer functions.
//!
//! Every block advances once per sample interval, driven by the interval's
//! average input `(u[k-1] + u[k]) / 2`. First-order lags use the exact
//! zero-order-hold pole `exp(-dt / tau)`; the bulk integrator then coincides
//! with the trapezoidal rule.

use super::{electrolyte_coefficient, CellParameters, Electrode};
use crate::error::{Error, Result};

/// `gain / (tau s + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderLag {
    gain: f64,
    tau: f64,
    pole: f64,
    state: f64,
}

impl FirstOrderLag {
    pub fn new(gain: f64, tau: f64, dt: f64) -> Self {
        Self {
            gain,
            tau,
            pole: (-dt / tau).exp(),
            state: 0.0,
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn time_constant(&self) -> f64 {
        self.tau
    }

    pub fn pole(&self) -> f64 {
        self.pole
    }

    pub fn output(&self) -> f64 {
        self.state
    }

    pub fn advance(&mut self, input: f64) -> f64 {
        self.state = self.pole * self.state + (1.0 - self.pole) * self.gain * input;
        self.state
    }

    pub fn reset(&mut self) {
        self.state = 0.0;
    }
}

/// `gain / s`, pole exactly at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrator {
    gain: f64,
    dt: f64,
    state: f64,
}

impl Integrator {
    pub fn new(gain: f64, dt: f64) -> Self {
        Self {
            gain,
            dt,
            state: 0.0,
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn output(&self) -> f64 {
        self.state
    }

    pub fn advance(&mut self, input: f64) -> f64 {
        self.state += self.gain * self.dt * input;
        self.state
    }

    pub fn reset(&mut self) {
        self.state = 0.0;
    }
}

/// Solid-phase diffusion of one electrode: `c = c0 + (G_b + G_d) * scale * I_e`.
///
/// `G_b = (2R/(7D) s + 3/R) / (R^2/(35D) s^2 + s)` splits into the integrator
/// `(3/R)/s` plus the lag `(R/(5D))/(tau s + 1)`; `G_d` is a second lag with
/// the same gain and time constant `tau = R^2/(35D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidDiffusion {
    pub electrode: Electrode,
    c_init: f64,
    c_max: f64,
    scale: f64,
    bulk_integrator: Integrator,
    bulk_lag: FirstOrderLag,
    diffusion_lag: FirstOrderLag,
}

impl SolidDiffusion {
    pub fn new(params: &CellParameters, electrode: Electrode, dt: f64) -> Self {
        let e = params.electrode(electrode);
        let tau = e.diffusion_time_constant();
        let lag_gain = e.radius / (5.0 * e.diffusivity);
        Self {
            electrode,
            c_init: e.c_init,
            c_max: e.c_max,
            scale: -e.radius / (3.0 * params.faraday * e.eps_am * e.thickness * params.area),
            bulk_integrator: Integrator::new(3.0 / e.radius, dt),
            bulk_lag: FirstOrderLag::new(lag_gain, tau, dt),
            diffusion_lag: FirstOrderLag::new(lag_gain, tau, dt),
        }
    }

    /// Integrator part of `G_b`.
    pub fn bulk_integrator(&self) -> &Integrator {
        &self.bulk_integrator
    }

    /// Lag part of `G_b`.
    pub fn bulk_lag(&self) -> &FirstOrderLag {
        &self.bulk_lag
    }

    /// `G_d`.
    pub fn diffusion_lag(&self) -> &FirstOrderLag {
        &self.diffusion_lag
    }

    /// Converts transfer-function output to concentration, mol/m^3 per unit.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    /// Advances with the interval-average electrode current.
    pub fn advance(&mut self, current: f64) {
        self.bulk_integrator.advance(current);
        self.bulk_lag.advance(current);
        self.diffusion_lag.advance(current);
    }

    pub fn surface_concentration(&self) -> f64 {
        self.c_init
            + self.scale
                * (self.bulk_integrator.output()
                    + self.bulk_lag.output()
                    + self.diffusion_lag.output())
    }

    pub fn bulk_concentration(&self) -> f64 {
        self.c_init + self.scale * self.bulk_integrator.output()
    }

    pub fn reset(&mut self) {
        self.bulk_integrator.reset();
        self.bulk_lag.reset();
        self.diffusion_lag.reset();
    }
}

/// Electrolyte potential `(G_pos + G_neg) * (C1 / D_e) * I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrolyteDiffusion {
    scale: f64,
    positive: FirstOrderLag,
    negative: FirstOrderLag,
}

impl ElectrolyteDiffusion {
    pub fn new(params: &CellParameters, dt: f64) -> Self {
        let (tau_pos, tau_neg) = params.electrolyte_time_constants();
        Self {
            scale: electrolyte_coefficient(params) / params.d_e,
            positive: FirstOrderLag::new(0.124 * params.gamma_p, tau_pos, dt),
            negative: FirstOrderLag::new(0.117 * params.gamma_n, tau_neg, dt),
        }
    }

    pub fn positive(&self) -> &FirstOrderLag {
        &self.positive
    }

    pub fn negative(&self) -> &FirstOrderLag {
        &self.negative
    }

    /// `C1 / D_e`, V/A per unit transfer-function output.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn advance(&mut self, current: f64) {
        self.positive.advance(current);
        self.negative.advance(current);
    }

    pub fn potential(&self) -> f64 {
        self.scale * (self.positive.output() + self.negative.output())
    }

    pub fn reset(&mut self) {
        self.positive.reset();
        self.negative.reset();
    }
}

/// Instantaneous outputs of all blocks at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOutputs {
    pub surface_p: f64,
    pub surface_n: f64,
    pub bulk_p: f64,
    pub bulk_n: f64,
    pub phi_e: f64,
}

impl BlockOutputs {
    pub fn surface(&self, electrode: Electrode) -> f64 {
        match electrode {
            Electrode::Positive => self.surface_p,
            Electrode::Negative => self.surface_n,
        }
    }

    pub fn bulk(&self, electrode: Electrode) -> f64 {
        match electrode {
            Electrode::Positive => self.bulk_p,
            Electrode::Negative => self.bulk_n,
        }
    }
}

/// All discretized blocks of the model, driven by the cell current.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteStateSpace {
    dt: f64,
    positive: SolidDiffusion,
    negative: SolidDiffusion,
    electrolyte: ElectrolyteDiffusion,
    last_current: Option<f64>,
}

impl DiscreteStateSpace {
    /// Discretizes the model at step `dt`. The step must resolve the fastest
    /// lag with at least ten samples per time constant.
    pub fn new(params: &CellParameters, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) {
            return Err(Error::NonPositiveStep(dt));
        }
        let tau_min = params.min_time_constant();
        if dt > tau_min / 10.0 {
            return Err(Error::StepTooCoarse { dt, tau_min });
        }
        Ok(Self {
            dt,
            positive: SolidDiffusion::new(params, Electrode::Positive, dt),
            negative: SolidDiffusion::new(params, Electrode::Negative, dt),
            electrolyte: ElectrolyteDiffusion::new(params, dt),
            last_current: None,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn solid(&self, electrode: Electrode) -> &SolidDiffusion {
        match electrode {
            Electrode::Positive => &self.positive,
            Electrode::Negative => &self.negative,
        }
    }

    pub fn electrolyte(&self) -> &ElectrolyteDiffusion {
        &self.electrolyte
    }

    pub fn outputs(&self) -> BlockOutputs {
        BlockOutputs {
            surface_p: self.positive.surface_concentration(),
            surface_n: self.negative.surface_concentration(),
            bulk_p: self.positive.bulk_concentration(),
            bulk_n: self.negative.bulk_concentration(),
            phi_e: self.electrolyte.potential(),
        }
    }

    /// Consumes the next current sample and returns the block outputs at
    /// that sample. The first sample only records the current; the state at
    /// sample 0 is the initial state.
    pub fn step(&mut self, current: f64) -> BlockOutputs {
        if let Some(prev) = self.last_current {
            let avg = 0.5 * (prev + current);
            self.positive.advance(Electrode::Positive.current_sign() * avg);
            self.negative.advance(Electrode::Negative.current_sign() * avg);
            self.electrolyte.advance(avg);
        }
        self.last_current = Some(current);
        self.outputs()
    }

    pub fn reset(&mut self) {
        self.positive.reset();
        self.negative.reset();
        self.electrolyte.reset();
        self.last_current = None;
    }

    /// Surface concentration of one electrode over a current history,
    /// one sample per entry.
    pub fn surface_concentration(
        &mut self,
        electrode: Electrode,
        history: &[f64],
    ) -> Result<Vec<f64>> {
        let c_max = self.solid(electrode).c_max();
        history
            .iter()
            .map(|&i| {
                let c = self.step(i).surface(electrode);
                if c > 0.0 && c < c_max {
                    Ok(c)
                } else {
                    Err(Error::ConcentrationOutOfRange {
                        electrode,
                        value: c,
                        c_max,
                    })
                }
            })
            .collect()
    }

    /// Electrolyte potential over a current history, V.
    pub fn electrolyte_potential(&mut self, history: &[f64]) -> Vec<f64> {
        history.iter().map(|&i| self.step(i).phi_e).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CellParameters {
        CellParameters::reference()
    }

    #[test]
    fn rejects_bad_steps() {
        let p = params();
        assert!(matches!(
            DiscreteStateSpace::new(&p, 0.0),
            Err(Error::NonPositiveStep(_))
        ));
        assert!(matches!(
            DiscreteStateSpace::new(&p, -1.0),
            Err(Error::NonPositiveStep(_))
        ));
        let tau = p.min_time_constant();
        assert!(DiscreteStateSpace::new(&p, tau / 10.0).is_ok());
        assert!(matches!(
            DiscreteStateSpace::new(&p, tau / 9.0),
            Err(Error::StepTooCoarse { .. })
        ));
    }

    #[test]
    fn lag_poles_inside_unit_interval() {
        let m = DiscreteStateSpace::new(&params(), 1.0).unwrap();
        let lags = [
            m.solid(Electrode::Positive).bulk_lag(),
            m.solid(Electrode::Positive).diffusion_lag(),
            m.solid(Electrode::Negative).bulk_lag(),
            m.solid(Electrode::Negative).diffusion_lag(),
            m.electrolyte().positive(),
            m.electrolyte().negative(),
        ];
        for lag in lags {
            assert!(lag.pole() > 0.0 && lag.pole() < 1.0);
        }
    }

    #[test]
    fn diffusion_lag_step_gain() {
        let mut p = params();
        p.r_n = 5e-6;
        p.d_n = 1e-14;
        let tau = p.electrode(Electrode::Negative).diffusion_time_constant();
        let mut lag = FirstOrderLag::new(p.r_n / (5.0 * p.d_n), tau, 1.0);
        assert!((lag.gain() - 1e8).abs() < 1e-6);
        let steps = (7.0 * tau).ceil() as usize;
        let mut y = 0.0;
        for _ in 0..steps {
            y = lag.advance(1.0);
        }
        assert!((y - 1e8).abs() / 1e8 < 1e-3);
    }

    #[test]
    fn zero_input_keeps_zero_state() {
        let mut m = DiscreteStateSpace::new(&params(), 1.0).unwrap();
        let init = m.outputs();
        for _ in 0..500 {
            assert_eq!(m.step(0.0), init);
        }
        assert_eq!(m.electrolyte().potential(), 0.0);
    }

    #[test]
    fn electrolyte_step_matches_continuous_response() {
        let p = params();
        let (tau, _) = p.electrolyte_time_constants();
        let dt = tau / 100.0;
        let gain = 0.124 * p.gamma_p;
        let mut lag = FirstOrderLag::new(gain, tau, dt);
        let mut worst: f64 = 0.0;
        for k in 1..=2000 {
            let y = lag.advance(1.0);
            let exact = gain * (1.0 - (-(k as f64) * dt / tau).exp());
            worst = worst.max((y - exact).abs());
        }
        assert!(worst < 1e-6 * gain, "deviation {worst}");
    }

    #[test]
    fn constant_current_ramp_rate() {
        let p = params();
        let mut m = DiscreteStateSpace::new(&p, 1.0).unwrap();
        let current = 2.0;
        let c = m
            .surface_concentration(Electrode::Negative, &vec![current; 2000])
            .unwrap();
        let e = p.electrode(Electrode::Negative);
        let expected = -current / (p.faraday * e.eps_am * e.thickness * p.area);
        let slope = c[1999] - c[1998];
        assert!((slope - expected).abs() / expected.abs() < 1e-9);
    }

    #[test]
    fn positive_electrode_lithiates_on_discharge() {
        let p = params();
        let mut m = DiscreteStateSpace::new(&p, 1.0).unwrap();
        let c = m.surface_concentration(Electrode::Positive, &[1.0; 100]).unwrap();
        assert!(c[99] > p.c_p0);
    }

    #[test]
    fn concentration_out_of_range_is_flagged() {
        let p = params();
        let mut m = DiscreteStateSpace::new(&p, 1.0).unwrap();
        // Discharging 3 A for long enough empties the anode.
        let err = m
            .surface_concentration(Electrode::Negative, &vec![3.0; 20_000])
            .unwrap_err();
        assert!(matches!(
            err,
            Error::ConcentrationOutOfRange {
                electrode: Electrode::Negative,
                ..
            }
        ));
    }
}
