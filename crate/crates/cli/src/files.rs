//! File-level helpers: reading inputs with path context and atomic
//! certificate writes (temp file in the target directory, then rename).

use serde::Deserialize;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn new(msg: impl fmt::Display) -> Self {
        CliError(msg.to_string())
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("{}: {e}", path.display())))
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
        None => std::path::PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
    };
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::new(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Vectors file for witt-extend and lift.
#[derive(Debug, Deserialize)]
pub struct SystemFile {
    pub sources: Vec<Vec<String>>,
    pub targets: Vec<Vec<String>>,
}

/// Vectors file for orbit-test.
#[derive(Debug, Deserialize)]
pub struct PairFile {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

pub fn parse_json_file<T: for<'de> Deserialize<'de>>(
    path: &Path,
    what: &str,
) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(format!("{what} {}: {e}", path.display())))
}
