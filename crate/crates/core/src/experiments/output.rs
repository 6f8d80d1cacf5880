use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Writes rows as CSV: header row, comma separated, LF line endings.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    file.flush()?;
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// `runs/out.csv` → `runs/out.summary.csv`
pub fn summary_path(path: &Path) -> PathBuf {
    with_suffix(path, ".summary.csv")
}

/// `runs/out.csv` → `runs/out.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    with_suffix(path, ".json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_paths() {
        let p = Path::new("runs/out.csv");
        assert_eq!(summary_path(p), Path::new("runs/out.summary.csv"));
        assert_eq!(sidecar_path(p), Path::new("runs/out.json"));
    }
}
