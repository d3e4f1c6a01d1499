//! Atomic result emission: outputs are staged in a temporary file in the
//! destination directory and renamed into place, so a crashed or failed run
//! never leaves a partial file behind.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{CovlabError, Result};

/// Write `contents` to `path` atomically (same-directory temp file +
/// rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CovlabError::Io(e.error))?;
    Ok(())
}
