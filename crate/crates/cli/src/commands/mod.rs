//! Subcommand implementations and shared output plumbing.

use std::path::Path;

use thermoedge_core::report::ReportMeta;

use crate::config::RunConfig;
use crate::CliError;

pub mod analyze;
pub mod canny;
pub mod compare;
pub mod synth;
pub mod train;

/// Stream tag for the image-granular split, kept apart from the per-epoch
/// shuffle streams (which use the epoch index).
pub const SPLIT_STREAM: u64 = 0x53504c4954; // "SPLIT"

pub fn artifact_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn report_meta(config: &RunConfig, seed: u64, scheme: String) -> ReportMeta {
    ReportMeta {
        artifact_version: artifact_version(),
        config_hash: config.hash(),
        seed,
        scheme,
    }
}

/// Writes through a temp file and renames, so readers never observe a
/// partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::data(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::data(format!("cannot move report into {}: {e}", path.display())))?;
    Ok(())
}

pub fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::data(format!("cannot serialize report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}
