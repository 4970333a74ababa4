//! On-disk formats: counts records, state specifications, two-photon states,
//! and the certification report envelope. All JSON with an explicit schema
//! version; CSV output uses a `.` decimal separator and 17 significant
//! digits.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use entcert::{
    CertificationReport64, ComplexMatrix64, CountsRecord, DensityMatrix64, NoiseModel,
    TwoPhotonState64,
};
use num_complex::Complex;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Counts file: schema version plus the raw record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub record: CountsRecord,
}

/// State specification consumed by `simulate`: a correlated block, a mixing
/// weight, and a noise model for the uncorrelated subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpecFile {
    pub schema_version: u32,
    pub d: usize,
    /// Correlated block, row-major `[re, im]` pairs of length `d^2`.
    pub alpha: Vec<[f64; 2]>,
    pub gamma: f64,
    pub noise: NoiseSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    None,
    White,
    Incoherent { lambda: Vec<f64> },
}

impl StateSpecFile {
    /// Builds the density matrix `gamma * rho_mc + (1 - gamma) * rho_noise`
    /// together with the noise model it implies.
    pub fn build(&self) -> CliResult<(DensityMatrix64, NoiseModel<f64>)> {
        if self.alpha.len() != self.d * self.d {
            return Err(CliError::input(format!(
                "alpha has {} entries, expected {}",
                self.alpha.len(),
                self.d * self.d
            )));
        }
        let alpha = ComplexMatrix64::from_pairs(self.d, &self.alpha).map_err(CliError::from)?;
        let mc = DensityMatrix64::maximally_correlated(&alpha)?;
        let (rho, model) = match (&self.noise, self.gamma) {
            (NoiseSpec::None, g) => {
                if g != 1.0 {
                    return Err(CliError::input(
                        "noise kind none requires gamma = 1".to_string(),
                    ));
                }
                (mc, NoiseModel::NoiseFree)
            }
            (spec, g) => {
                let lambda = match spec {
                    NoiseSpec::None => unreachable!(),
                    NoiseSpec::White => {
                        vec![1.0 / (self.d * (self.d - 1)) as f64; self.d * (self.d - 1)]
                    }
                    NoiseSpec::Incoherent { lambda } => lambda.clone(),
                };
                let noise = DensityMatrix64::diagonal_noise(&lambda)?;
                let rho = DensityMatrix64::mix(&mc, &noise, g)?;
                let model = match spec {
                    NoiseSpec::White => NoiseModel::White,
                    _ => NoiseModel::Incoherent { lambda },
                };
                (rho, model)
            }
        };
        Ok((rho, model))
    }
}

/// Two-photon pure state for `parity-sim`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoPhotonStateFile {
    pub schema_version: u32,
    /// Mode-pair amplitudes as `[re, im]` pairs.
    pub amplitudes: Vec<[f64; 2]>,
}

impl TwoPhotonStateFile {
    pub fn build(&self) -> CliResult<TwoPhotonState64> {
        let amps: Vec<Complex<f64>> = self
            .amplitudes
            .iter()
            .map(|p| Complex::new(p[0], p[1]))
            .collect();
        TwoPhotonState64::new(amps).map_err(CliError::from)
    }
}

/// Flags echoed into the report for reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagsEcho {
    pub noise_model: String,
    pub mc_threshold: f64,
    pub bootstrap: usize,
    pub seed: u64,
}

/// Where the report came from: the SHA-256 of the input bytes plus the flags
/// in effect. No timestamps; identical runs produce identical reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub flags: FlagsEcho,
    pub tool_version: String,
}

/// Spread of the certified bound under count resampling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub resamples: usize,
    pub failures: usize,
    pub ree_mean: f64,
    pub ree_std: f64,
    pub ree_p025: f64,
    pub ree_p975: f64,
}

/// Report file: the certification report plus provenance and the optional
/// bootstrap block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub report: CertificationReport64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
    pub provenance: Provenance,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<(T, Vec<u8>)> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes)?;
    Ok((value, bytes))
}

/// Serializes deterministically: pretty JSON plus a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Counts metadata block used by `simulate`; BTreeMap keeps key order stable.
pub fn simulate_metadata(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// One row of curve output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub d: usize,
    pub purity: f64,
    pub bound: f64,
}

/// 17-significant-digit float formatting for CSV cells.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
