//! Synthetic excitation profiles standing in for the characterization
//! (training) and drive-cycle (verification) data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CellParameters, CurrentProfile, Electrode};

/// Bulk stoichiometry window a generated profile must respect.
pub const SOC_WINDOW: (f64, f64) = (0.05, 0.95);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Pulse staircase at 0.2/0.5/1/2 C with rests, stepping down in SOC.
    RcidLike,
    /// Smoothed random current, repeated cycle after cycle.
    DriveCycleLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub name: String,
    pub kind: ProfileKind,
    pub duration_s: f64,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default)]
    pub seed: u64,
    /// Capacity defining the C-rate, Ah.
    #[serde(default = "default_capacity")]
    pub capacity_ah: f64,
}

fn default_dt() -> f64 {
    1.0
}

fn default_capacity() -> f64 {
    3.0
}

impl ProfileSpec {
    pub fn rcid(name: &str, duration_s: f64) -> Self {
        Self {
            name: name.to_owned(),
            kind: ProfileKind::RcidLike,
            duration_s,
            dt_s: 1.0,
            seed: 0,
            capacity_ah: default_capacity(),
        }
    }

    pub fn drive_cycle(name: &str, duration_s: f64, seed: u64) -> Self {
        Self {
            name: name.to_owned(),
            kind: ProfileKind::DriveCycleLike,
            duration_s,
            dt_s: 1.0,
            seed,
            capacity_ah: default_capacity(),
        }
    }
}

const PULSE_RATES: [f64; 4] = [0.2, 0.5, 1.0, 2.0];
const PULSE_S: f64 = 10.0;
const PULSE_REST_S: f64 = 20.0;
const SOC_STEP_S: f64 = 150.0;
const SOC_STEP_RATE: f64 = 2.0;
const SOC_REST_S: f64 = 60.0;

const CYCLE_S: f64 = 600.0;
const CYCLE_PEAK_RATE: f64 = 2.0;
const CYCLE_SMOOTHING_S: f64 = 8.0;

/// Current (A) of the characterization staircase at time `t`, s.
fn rcid_current(t: f64, one_c: f64) -> f64 {
    let pulse_block = PULSE_RATES.len() as f64 * 2.0 * (PULSE_S + PULSE_REST_S);
    let period = pulse_block + SOC_STEP_S + SOC_REST_S;
    let local = t % period;
    if local < pulse_block {
        let slot = PULSE_S + PULSE_REST_S;
        let idx = (local / slot) as usize;
        let within = local - idx as f64 * slot;
        if within >= PULSE_S {
            return 0.0;
        }
        let rate = PULSE_RATES[idx / 2];
        let sign = if idx.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * rate * one_c
    } else if local < pulse_block + SOC_STEP_S {
        SOC_STEP_RATE * one_c
    } else {
        0.0
    }
}

/// One cycle of smoothed, zero-mean random current.
fn drive_cycle(len: usize, dt: f64, one_c: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // White noise through two first-order smoothing passes.
    let a = (-dt / CYCLE_SMOOTHING_S).exp();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let warmup = (5.0 * CYCLE_SMOOTHING_S / dt).ceil() as usize;
    let mut raw = Vec::with_capacity(len);
    for k in 0..len + warmup {
        let w: f64 = rng.random_range(-1.0..1.0);
        s1 = a * s1 + (1.0 - a) * w;
        s2 = a * s2 + (1.0 - a) * s1;
        if k >= warmup {
            raw.push(s2);
        }
    }
    let mean = raw.iter().sum::<f64>() / len as f64;
    let peak = raw
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    raw.iter()
        .map(|v| (v - mean) / peak * CYCLE_PEAK_RATE * one_c)
        .collect()
}

/// Generates a profile and checks that it keeps the reference cell's bulk
/// stoichiometry inside [`SOC_WINDOW`].
pub fn generate_profile(spec: &ProfileSpec, reference: &CellParameters) -> Result<CurrentProfile> {
    let dt = spec.dt_s;
    if !(dt > 0.0) {
        return Err(Error::NonPositiveStep(dt));
    }
    if !(spec.duration_s >= 100.0 * dt) {
        return Err(Error::InvalidProfile(format!(
            "duration {} s shorter than 100 samples",
            spec.duration_s
        )));
    }
    if !(spec.capacity_ah > 0.0) {
        return Err(Error::InvalidProfile("capacity must be positive".into()));
    }
    let one_c = spec.capacity_ah;
    let n = (spec.duration_s / dt).round() as usize + 1;
    let samples = match spec.kind {
        ProfileKind::RcidLike => (0..n).map(|k| rcid_current(k as f64 * dt, one_c)).collect(),
        ProfileKind::DriveCycleLike => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let cycle_len = ((CYCLE_S / dt).round() as usize).clamp(1, n);
            let cycle = drive_cycle(cycle_len, dt, one_c, &mut rng);
            cycle.iter().copied().cycle().take(n).collect()
        }
    };
    let profile = CurrentProfile::new(dt, samples)?;
    check_soc_window(&profile, reference)?;
    Ok(profile)
}

/// Fails if either electrode's bulk stoichiometry leaves [`SOC_WINDOW`].
pub fn check_soc_window(profile: &CurrentProfile, params: &CellParameters) -> Result<()> {
    for electrode in Electrode::BOTH {
        let e = params.electrode(electrode);
        let q = params.stoichiometric_charge(electrode);
        let mut x = e.c_init / e.c_max;
        let mut prev = profile.samples()[0];
        for (k, &i) in profile.samples().iter().enumerate() {
            if k > 0 {
                x -= electrode.current_sign() * 0.5 * (prev + i) * profile.dt() / q;
            }
            prev = i;
            if !(SOC_WINDOW.0..=SOC_WINDOW.1).contains(&x) {
                return Err(Error::SocWindowViolation {
                    electrode,
                    value: x,
                    index: k,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rcid_is_piecewise_constant_with_exact_rests() {
        let p = generate_profile(&ProfileSpec::rcid("r", 3600.0), &CellParameters::reference()).unwrap();
        assert_eq!(p.len(), 3601);
        let levels: Vec<f64> = PULSE_RATES
            .iter()
            .flat_map(|r| [r * 3.0, -r * 3.0])
            .chain([SOC_STEP_RATE * 3.0, 0.0])
            .collect();
        for &i in p.samples() {
            assert!(levels.contains(&i), "unexpected level {i}");
        }
        let rests = p.samples().iter().filter(|&&i| i == 0.0).count();
        assert!(rests > 1000);
    }

    #[test]
    fn drive_cycle_is_seeded() {
        let r = CellParameters::reference();
        let a = generate_profile(&ProfileSpec::drive_cycle("d", 1800.0, 5), &r).unwrap();
        let b = generate_profile(&ProfileSpec::drive_cycle("d", 1800.0, 5), &r).unwrap();
        let c = generate_profile(&ProfileSpec::drive_cycle("d", 1800.0, 6), &r).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let peak = a.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak <= 2.0 * 3.0 + 1e-9);
        // Repeated cycles.
        assert_eq!(a.samples()[10], a.samples()[610]);
    }

    #[test]
    fn too_short_duration_rejected() {
        let r = CellParameters::reference();
        assert!(generate_profile(&ProfileSpec::rcid("r", 50.0), &r).is_err());
    }

    #[test]
    fn long_staircase_violates_soc_window() {
        let r = CellParameters::reference();
        assert!(matches!(
            generate_profile(&ProfileSpec::rcid("r", 20_000.0), &r),
            Err(Error::SocWindowViolation { .. })
        ));
    }
}
