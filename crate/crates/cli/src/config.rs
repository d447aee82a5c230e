//! Scenario files.
//!
//! A scenario is a TOML document. Every table is optional except the one the
//! chosen subcommand needs, and unknown keys are rejected. See
//! `docs/config.md` for the full schema.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nonrad::current::{BuiltinSource, FourCurrent};
use nonrad::decomposition::ReconstructionSpec;
use nonrad::exchange::{PvSpec, StaticsSpec};
use nonrad::propagator::SuiteSpec;
use nonrad::quadrature::QuadratureSpec;
use nonrad::sampled::SampledCurrent;
use nonrad::PhysicalConstants;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub constants: PhysicalConstants,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub output: OutputConfig,
    /// Single source for `classify` and `emit-spectrum`.
    #[serde(default)]
    pub source: Option<toml::Table>,
    /// Source list for `static-energy`.
    #[serde(default)]
    pub sources: Vec<BuiltinSource>,
    #[serde(default)]
    pub classify: ClassifyConfig,
    #[serde(default)]
    pub emit_spectrum: EmitConfig,
    #[serde(default)]
    pub shell_scan: ShellScanConfig,
    #[serde(default)]
    pub static_energy: StaticEnergyConfig,
    #[serde(default)]
    pub verify_propagator: SuiteSpec,
    /// Directory of the scenario file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    /// Shell width; a hundredth of the squared peak wave number when absent.
    pub epsilon: Option<f64>,
    pub threshold: f64,
    /// Random momentum points for the split diagnostics.
    pub samples: usize,
    /// Highest harmonic for periodic sources.
    pub n_max: u32,
    /// Reconstruct the radiating part and report its wave residual.
    pub wave_check: bool,
    /// Grid points per axis of the reconstruction.
    pub grid_points: usize,
    /// Grid spacing in units of the peak wavelength over 2 pi.
    pub grid_spacing: f64,
    pub reconstruction: ReconstructionSpec,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            epsilon: None,
            threshold: 1e-12,
            samples: 64,
            n_max: 8,
            wave_check: true,
            grid_points: 11,
            grid_spacing: 0.02,
            reconstruction: ReconstructionSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitConfig {
    /// Highest harmonic for periodic sources.
    pub n_max: u32,
    /// Last photon count in the Poisson table; sized from the mean when absent.
    pub poisson_n_max: Option<usize>,
    /// Include the angular distribution in the JSON output.
    pub angular: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig { n_max: 8, poisson_n_max: None, angular: false }
    }
}

/// Orbiting shell scanned over its diameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShellScanConfig {
    /// Diameter range in units of `c T`, both ends included.
    pub d_min: f64,
    pub d_max: f64,
    pub steps: usize,
    pub n_max: u32,
    pub charge: f64,
    pub period: f64,
    /// Orbital speed over `c`.
    pub orbit_speed: f64,
    /// Shell thickness; a fiftieth of the orbit radius when absent.
    pub sigma: Option<f64>,
}

impl Default for ShellScanConfig {
    fn default() -> Self {
        ShellScanConfig { d_min: 0.2, d_max: 3.2, steps: 61, n_max: 8, charge: 1.0, period: 2.0 * PI, orbit_speed: 0.05, sigma: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaticEnergyConfig {
    pub include_self: bool,
    /// Compare against the closed form when one applies.
    pub oracle: bool,
    /// Ring nodes of the thin-filament inductance oracle.
    pub oracle_nodes: usize,
    pub statics: StaticsSpec,
    /// Switch the sources on for a Gaussian window of this width and compute
    /// the action as well.
    pub window_tau: Option<f64>,
    pub pv: PvSpec,
}

impl Default for StaticEnergyConfig {
    fn default() -> Self {
        StaticEnergyConfig {
            include_self: false,
            oracle: true,
            oracle_nodes: 2048,
            statics: StaticsSpec::default(),
            window_tau: None,
            pv: PvSpec::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", cfg.schema_version)));
        }
        cfg.constants.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Config::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// The `[source]` table: a built-in variant or `variant = "sampled"` with a `path`.
    pub fn source(&self) -> Result<FourCurrent, CliError> {
        let table = self.source.as_ref().ok_or_else(|| CliError::Config("missing [source] table".into()))?;
        if table.get("variant").and_then(|v| v.as_str()) == Some("sampled") {
            let r: SampledRef = table.clone().try_into().map_err(|e: toml::de::Error| CliError::Config(format!("[source]: {e}")))?;
            let path = self.base_dir.join(r.path);
            let s = SampledCurrent::load(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            return Ok(FourCurrent::Sampled(s));
        }
        let b: BuiltinSource = table.clone().try_into().map_err(|e: toml::de::Error| CliError::Config(format!("[source]: {e}")))?;
        b.validate()?;
        Ok(FourCurrent::Builtin(b))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct SampledRef {
    variant: String,
    path: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = Config::from_toml("schema_version = 1").unwrap();
        assert_eq!(cfg.constants, PhysicalConstants::NATURAL);
        assert_eq!(cfg.shell_scan.steps, 61);
        assert!(cfg.source.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml("schema_version = 1\nbogus = 3").is_err());
        assert!(Config::from_toml("schema_version = 1\n[shell_scan]\nstep = 3").is_err());
        assert!(Config::from_toml("schema_version = 2").is_err());
        assert!(Config::from_toml("seed = 2").is_err());
    }

    #[test]
    fn builtin_source_table() {
        let cfg = Config::from_toml(
            r#"
schema_version = 1
[source]
variant = "gaussian_dipole_pulse"
dipole_amplitude = 1.0
carrier_omega = 1.0
envelope_width = 5.0
"#,
        )
        .unwrap();
        assert!(matches!(cfg.source().unwrap(), FourCurrent::Builtin(BuiltinSource::GaussianDipolePulse(_))));
    }

    #[test]
    fn bad_source_is_a_config_error() {
        let cfg = Config::from_toml("schema_version = 1\n[source]\nvariant = \"static_gaussian_charge\"\ncharge = 1.0\nsigma = -1.0").unwrap();
        assert_eq!(cfg.source().unwrap_err().exit_code(), 2);
        let cfg = Config::from_toml("schema_version = 1\n[source]\nvariant = \"sampled\"\npath = \"/nonexistent.bin\"").unwrap();
        assert_eq!(cfg.source().unwrap_err().exit_code(), 2);
    }
}
