//! Shared serialization helpers.

use crate::error::{Error, Result};
use std::path::Path;

/// Serialize an `f64` with 17 significant digits, which round-trips exactly
/// through `str::parse::<f64>()`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `contents` to `path` atomically: the data goes to a temporary file
/// in the same directory, which is then renamed over the target, so readers
/// never observe a partially written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let display = path.display().to_string();
    let io_err = |source: std::io::Error| Error::Io {
        path: display.clone(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    use std::io::Write;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error)).map(|_| ())
}
