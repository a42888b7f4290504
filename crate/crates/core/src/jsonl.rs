//! Line-delimited JSON record files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Record { path: PathBuf, line: usize, source: serde_json::Error },
}

/// Reads every non-blank line of `path` as one record.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let io_err = |source| JsonlError::Io { path: path.to_path_buf(), source };
    let file = File::open(path).map_err(io_err)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|source| JsonlError::Record { path: path.to_path_buf(), line: i + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}

/// Writes one record per line to any sink.
pub fn write_to<T: Serialize, W: Write>(mut out: W, records: impl IntoIterator<Item = T>) -> io::Result<usize> {
    let mut n = 0;
    for rec in records {
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
        n += 1;
    }
    out.flush()?;
    Ok(n)
}

/// Replaces `path` with the given records.
pub fn write<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<usize, JsonlError> {
    let io_err = |source| JsonlError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_to(BufWriter::new(file), records).map_err(io_err)
}
