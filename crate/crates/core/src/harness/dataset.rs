//! Synthetic datasets and their on-disk layout: one
//! `time_s,current_A,voltage_V` CSV per profile plus a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::profiles::{generate_profile, ProfileSpec};
use super::seeds::split_seed;
use crate::error::{Error, Result};
use crate::identification::{DatasetRole, IdentificationDataset, ProfileRecord};
use crate::model::{simulate, Cell, CurrentProfile, VoltageSeries};

/// Simulates `truth` on each profile and adds seeded Gaussian noise.
///
/// Profile `i` draws its noise from stream `i` of `seed`.
pub fn generate_synthetic_dataset(
    truth: &Cell,
    role: DatasetRole,
    profiles: &[ProfileSpec],
    noise_sigma_v: f64,
    seed: u64,
) -> Result<IdentificationDataset> {
    if !(noise_sigma_v >= 0.0) || !noise_sigma_v.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "noise sigma must be non-negative, got {noise_sigma_v}"
        )));
    }
    let mut records = Vec::with_capacity(profiles.len());
    for (i, spec) in profiles.iter().enumerate() {
        let current = generate_profile(spec, &truth.params)?;
        let clean = simulate(&truth.params, &truth.ocv_p, &truth.ocv_n, &current)?;
        let voltage = if noise_sigma_v > 0.0 {
            let normal = Normal::new(0.0, noise_sigma_v).expect("sigma checked");
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, i as u64));
            let noisy = clean
                .samples()
                .iter()
                .map(|v| v + normal.sample(&mut rng))
                .collect();
            VoltageSeries::new(clean.dt(), noisy)?
        } else {
            clean
        };
        records.push(ProfileRecord {
            name: spec.name.clone(),
            current,
            voltage,
        });
    }
    let mut dataset = IdentificationDataset::new(role, records)?;
    dataset.truth = Some(truth.params.theta().to_vec());
    Ok(dataset)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    /// CSV path, relative to the manifest.
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub train: Vec<ManifestEntry>,
    pub test: Vec<ManifestEntry>,
    /// Ground-truth (k_p, k_n, D_e) used to synthesize the data.
    #[serde(default)]
    pub truth: Option<Vec<f64>>,
    #[serde(default)]
    pub noise_sigma_v: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn write_profile_csv(record: &ProfileRecord, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["time_s", "current_A", "voltage_V"])
        .map_err(|e| Error::csv(path, e))?;
    for ((t, i), v) in record
        .current
        .times()
        .zip(record.current.samples())
        .zip(record.voltage.samples())
    {
        w.write_record([t.to_string(), i.to_string(), v.to_string()])
            .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_profile_csv(name: &str, path: &Path) -> Result<ProfileRecord> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?;
    if header.iter().collect::<Vec<_>>() != ["time_s", "current_A", "voltage_V"] {
        return Err(Error::InvalidDataset(format!(
            "{}: expected header time_s,current_A,voltage_V",
            path.display()
        )));
    }
    let mut times = Vec::new();
    let mut current = Vec::new();
    let mut voltage = Vec::new();
    for row in r.deserialize::<(f64, f64, f64)>() {
        let (t, i, v) = row.map_err(|e| Error::csv(path, e))?;
        times.push(t);
        current.push(i);
        voltage.push(v);
    }
    if times.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "{}: need at least two samples",
            path.display()
        )));
    }
    let dt = times[1] - times[0];
    for (k, t) in times.iter().enumerate() {
        let expected = times[0] + k as f64 * dt;
        if (t - expected).abs() > 1e-6 * dt.abs().max(1.0) {
            return Err(Error::InvalidDataset(format!(
                "{}: non-uniform sampling at row {}",
                path.display(),
                k + 1
            )));
        }
    }
    let current = CurrentProfile::new(dt, current)
        .map_err(|e| Error::InvalidDataset(format!("{}: {e}", path.display())))?;
    let voltage = VoltageSeries::new(dt, voltage)
        .map_err(|e| Error::InvalidDataset(format!("{}: {e}", path.display())))?;
    Ok(ProfileRecord {
        name: name.to_owned(),
        current,
        voltage,
    })
}

/// Writes both datasets and the manifest into `dir`; returns the manifest path.
pub fn write_dataset(
    dir: impl AsRef<Path>,
    train: &IdentificationDataset,
    test: &IdentificationDataset,
    noise_sigma_v: f64,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let entries = |d: &IdentificationDataset, prefix: &str| -> Result<Vec<ManifestEntry>> {
        d.records
            .iter()
            .map(|r| {
                let file = format!("{prefix}_{}.csv", r.name);
                write_profile_csv(r, &dir.join(&file))?;
                Ok(ManifestEntry {
                    name: r.name.clone(),
                    file,
                })
            })
            .collect()
    };
    let manifest = DatasetManifest {
        train: entries(train, "train")?,
        test: entries(test, "test")?,
        truth: train.truth.clone().or_else(|| test.truth.clone()),
        noise_sigma_v,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::json(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Loads `(train, test)` from a manifest written by [`write_dataset`].
pub fn load_dataset(
    manifest_path: impl AsRef<Path>,
) -> Result<(IdentificationDataset, IdentificationDataset)> {
    let path = manifest_path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| Error::InvalidDataset(format!("{}: {e}", path.display())))?;
    if manifest.train.is_empty() {
        return Err(Error::InvalidDataset("manifest lists no training profiles".into()));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let load = |entries: &[ManifestEntry], role| -> Result<IdentificationDataset> {
        let records = entries
            .iter()
            .map(|e| read_profile_csv(&e.name, &base.join(&e.file)))
            .collect::<Result<Vec<_>>>()?;
        let mut d = IdentificationDataset::new(role, records)?;
        d.truth = manifest.truth.clone();
        Ok(d)
    };
    Ok((
        load(&manifest.train, DatasetRole::Train)?,
        load(&manifest.test, DatasetRole::Test)?,
    ))
}
