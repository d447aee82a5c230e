//! Library side of the `nonrad` command-line tool.

pub mod commands;
pub mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nonrad::PhysicalConstants;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nonrad::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use nonrad::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) | E::WrongMode(_) | E::Format(_) => EXIT_CONFIG,
                E::NonConverged(_) | E::PvUnstable { .. } | E::CutoffTooLow { .. } | E::GridTooCoarse { .. } | E::ZeroWaveVector => EXIT_CONVERGENCE,
                E::SingularOverlap(_) => EXIT_SINGULAR,
                E::Io(_) => EXIT_IO,
            },
        }
    }
}

/// What a finished command reports back to `main`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

/// Common metadata wrapped around every JSON result.
pub fn envelope(command: &str, seed: u64, consts: &PhysicalConstants, result: Value) -> Value {
    let units = if *consts == PhysicalConstants::NATURAL { "natural" } else { "custom" };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "schema_version": config::SCHEMA_VERSION,
        "command": command,
        "units": units,
        "constants": consts,
        "seed": seed,
        "timestamp": timestamp,
        "result": result,
    })
}

/// Fields that legitimately differ between otherwise identical runs.
pub const VOLATILE_FIELDS: [&str; 1] = ["timestamp"];

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io(e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io)
}

pub(crate) fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(nonrad::Error::NonConverged("x".into())).exit_code(), 3);
        assert_eq!(CliError::Core(nonrad::Error::SingularOverlap("x".into())).exit_code(), 4);
        assert_eq!(CliError::Core(nonrad::Error::InvalidParameter("x".into())).exit_code(), 2);
    }

    #[test]
    fn envelope_marks_units() {
        let v = envelope("classify", 3, &PhysicalConstants::NATURAL, json!({}));
        assert_eq!(v["units"], "natural");
        assert_eq!(v["seed"], 3);
        let v = envelope("classify", 3, &PhysicalConstants { c: 2.0, hbar: 1.0 }, json!({}));
        assert_eq!(v["units"], "custom");
    }
}
