//! Artifact delivery: a common JSON envelope, atomic writes, and the
//! human-readable number formatting used on stdout.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::error::CliError;

/// Version stamp embedded in every artifact.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wrapper for every JSON artifact: the payload plus the version and the
/// fully resolved configuration that produced it. Field order is fixed and
/// nothing time- or host-dependent is included, so identical runs produce
/// byte-identical files.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a ResolvedConfig,
    pub result: T,
}

/// Writes `bytes` to `dir/name` atomically: the data lands in a temp file in
/// the same directory and is renamed into place, so readers never observe a
/// partial artifact.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io_err = |what: &str, e: std::io::Error| {
        CliError::Config(format!("cannot write {what} in {}: {e}", dir.display()))
    };
    fs::create_dir_all(dir).map_err(|e| io_err("artifacts", e))?;
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| io_err(name, e))?;
    let path = dir.join(name);
    fs::rename(&tmp, &path).map_err(|e| io_err(name, e))?;
    Ok(path)
}

/// Serializes `value` as pretty JSON (trailing newline included) and writes
/// it atomically.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Invariant(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

/// Formats a time in seconds to three significant figures with a scaled
/// unit, e.g. `2.8868e-4 → "0.289 ms"`. The unit is the largest one keeping
/// the value at or above 0.1.
pub fn format_duration(seconds: f64) -> String {
    if seconds == 0.0 {
        return "0 s".into();
    }
    let units = [("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9)];
    let (unit, scale) = units
        .iter()
        .find(|&&(_, scale)| seconds.abs() / scale >= 0.1)
        .copied()
        .unwrap_or(*units.last().unwrap());
    format!("{} {unit}", sig3(seconds / scale))
}

fn sig3(v: f64) -> String {
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (2 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_pulse_time_formats_as_ms() {
        assert_eq!(format_duration(2.886_751e-4), "0.289 ms");
    }

    #[test]
    fn unit_scaling_covers_common_ranges() {
        assert_eq!(format_duration(0.0), "0 s");
        assert_eq!(format_duration(1.5), "1.50 s");
        assert_eq!(format_duration(0.03), "30.0 ms");
        assert_eq!(format_duration(2.5e-7), "0.250 us");
        assert_eq!(format_duration(5.0e-10), "0.500 ns");
    }

    #[test]
    fn three_significant_figures() {
        assert_eq!(sig3(288.68), "289");
        assert_eq!(sig3(28.868), "28.9");
        assert_eq!(sig3(0.28868), "0.289");
    }
}
