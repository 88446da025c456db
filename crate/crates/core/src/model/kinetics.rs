use super::{CellParameters, Electrode};
use crate::error::{Error, Result};

/// Exchange current density of one electrode at surface concentration `c`
/// and temperature `temp`, A/m^2.
pub fn exchange_current_density(
    params: &CellParameters,
    electrode: Electrode,
    c: f64,
    temp: f64,
) -> Result<f64> {
    let e = params.electrode(electrode);
    let arg = c * (e.c_max - c) * e.c_e;
    if !(c > 0.0 && c < e.c_max && arg > 0.0) {
        return Err(Error::ConcentrationOutOfRange {
            electrode,
            value: c,
            c_max: e.c_max,
        });
    }
    let arrhenius = ((1.0 / params.t_ref - 1.0 / temp) * e.activation_energy / params.r_gas).exp();
    Ok(arrhenius * params.faraday * e.rate_constant * arg.sqrt())
}

/// Linearized Butler-Volmer overpotential, V. `current` is the electrode
/// reaction current (positive = delithiation of that electrode).
pub fn kinetic_overpotential(
    params: &CellParameters,
    electrode: Electrode,
    current: f64,
    i0: f64,
) -> Result<f64> {
    if i0 == 0.0 || !i0.is_finite() {
        return Err(Error::DivisionByZero);
    }
    let j = params.electrode(electrode).flux_factor;
    Ok(params.r_gas * params.t0 * (-j * current) / (params.faraday * i0))
}

/// Electrolyte coefficient `C1`, V m^2/(s A). Evaluated at `t0`.
pub fn electrolyte_coefficient(params: &CellParameters) -> f64 {
    let ce = params.c_e0 / 1000.0;
    let bracket =
        0.601 - 0.24 * ce.sqrt() + 0.982 * (1.0 - 0.0052 * (params.t0 - params.t_ref) * ce.powf(1.5));
    2.0 * params.r_gas
        * params.t0
        * (-params.l_cell / params.area_s / (params.faraday * params.faraday * params.c_e0))
        * (1.0 - params.t_plus)
        * (1.0 + params.beta)
        * bracket
}

/// Ohmic drop across the electrolyte, V.
pub fn ohmic_drop(params: &CellParameters, current: f64) -> f64 {
    -current * params.l_cell / (params.kappa * params.area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CellParameters {
        CellParameters::reference()
    }

    #[test]
    fn arrhenius_factor_vanishes_at_reference_temperature() {
        let p = params();
        let c = 12_000.0;
        let i0 = exchange_current_density(&p, Electrode::Negative, c, p.t_ref).unwrap();
        let direct = p.faraday * p.k_n * (c * (p.c_max_n - c) * p.c_e0).sqrt();
        assert!((i0 - direct).abs() <= 1e-15 * direct);
    }

    #[test]
    fn exchange_current_regression_value() {
        // k_n = 1e-11, c_n = 15000, c_max_n = 30000, c_e = 1200, T = T_ref.
        // 96485.33212 * 1e-11 * sqrt(15000 * 15000 * 1200), evaluated separately.
        let mut p = params();
        p.k_n = 1e-11;
        p.c_max_n = 30_000.0;
        p.c_n0 = 10_000.0;
        p.c_e_n = Some(1200.0);
        let i0 = exchange_current_density(&p, Electrode::Negative, 15_000.0, p.t_ref).unwrap();
        let pinned = 0.501_352_492_250_992;
        assert!((i0 - pinned).abs() < 1e-12, "{i0}");
    }

    #[test]
    fn hotter_cell_has_faster_kinetics() {
        let p = params();
        let cold = exchange_current_density(&p, Electrode::Positive, 20_000.0, 273.15).unwrap();
        let hot = exchange_current_density(&p, Electrode::Positive, 20_000.0, 318.15).unwrap();
        assert!(hot > cold);
    }

    #[test]
    fn degenerate_concentrations_rejected() {
        let p = params();
        for c in [p.c_max_n, p.c_max_n + 1e-9, 0.0, -1.0] {
            assert!(matches!(
                exchange_current_density(&p, Electrode::Negative, c, p.t_ref),
                Err(Error::ConcentrationOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn overpotential_is_odd_in_current() {
        let p = params();
        let i0 = 0.7;
        assert_eq!(kinetic_overpotential(&p, Electrode::Positive, 0.0, i0).unwrap(), 0.0);
        for i in [0.1, 1.0, 3.7] {
            let a = kinetic_overpotential(&p, Electrode::Positive, i, i0).unwrap();
            let b = kinetic_overpotential(&p, Electrode::Positive, -i, i0).unwrap();
            assert_eq!(a, -b);
            assert!(a < 0.0);
        }
        assert!(matches!(
            kinetic_overpotential(&p, Electrode::Negative, 1.0, 0.0),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn doubling_rate_constant_halves_overpotential() {
        let p = params();
        let mut q = p.clone();
        q.k_p *= 2.0;
        let c = 25_000.0;
        let i0 = exchange_current_density(&p, Electrode::Positive, c, p.t_cell).unwrap();
        let i0q = exchange_current_density(&q, Electrode::Positive, c, q.t_cell).unwrap();
        let eta = kinetic_overpotential(&p, Electrode::Positive, 2.5, i0).unwrap();
        let etaq = kinetic_overpotential(&q, Electrode::Positive, 2.5, i0q).unwrap();
        // Direct evaluation of R T0 J I / (F * F k sqrt(...)).
        let j = p.electrode(Electrode::Positive).flux_factor;
        let direct = -p.r_gas * p.t0 * j * 2.5
            / (p.faraday * p.faraday * q.k_p * (c * (p.c_max_p - c) * p.c_e0).sqrt());
        assert!((etaq - 0.5 * eta).abs() < 1e-15);
        assert!((etaq - direct).abs() < 1e-15);
    }

    #[test]
    fn electrolyte_coefficient_at_reference_concentration() {
        let mut p = params();
        p.c_e0 = 1000.0;
        p.t0 = p.t_ref;
        let c1 = electrolyte_coefficient(&p);
        let hand = 2.0 * p.r_gas * p.t0 * (-p.l_cell / (p.area_s * p.faraday.powi(2) * 1000.0))
            * (1.0 - p.t_plus)
            * (1.0 + p.beta)
            * 1.343;
        assert!((c1 - hand).abs() <= 1e-14 * hand.abs());
        assert!(c1 < 0.0);
    }

    #[test]
    fn ohmic_drop_arithmetic() {
        let mut p = params();
        p.l_cell = 1e-4;
        p.kappa = 1.0;
        p.area = 0.1;
        assert_eq!(ohmic_drop(&p, 0.0), 0.0);
        assert!((ohmic_drop(&p, 1.0) + 1e-3).abs() < 1e-18);
        assert!((ohmic_drop(&p, 3.0) - 3.0 * ohmic_drop(&p, 1.0)).abs() < 1e-18);
    }
}
