//! Snapshot files: line-delimited JSON records, written atomically.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::store::{LineError, Record, RecordCounts, Stores};

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("snapshot corrupt at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error(transparent)]
    Rejected(#[from] LineError),
}

impl SnapshotError {
    /// 1-based line the error refers to, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            SnapshotError::Io { .. } => None,
            SnapshotError::Corrupt { line, .. } => Some(*line),
            SnapshotError::Rejected(e) => Some(e.line),
        }
    }
}

fn io_error(path: &Path, source: io::Error) -> SnapshotError {
    SnapshotError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Parses snapshot text into numbered records. Blank lines are skipped.
pub fn parse_records(text: &str) -> Result<Vec<(usize, Record)>, SnapshotError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<Record>(l)
                .map(|r| (i + 1, r))
                .map_err(|e| SnapshotError::Corrupt {
                    line: i + 1,
                    reason: e.to_string(),
                })
        })
        .collect()
}

/// Rebuilds stores from snapshot text, re-validating every referential
/// invariant on the way in.
pub fn load_str(text: &str) -> Result<Stores, SnapshotError> {
    let mut stores = Stores::new();
    stores.apply_all(parse_records(text)?)?;
    Ok(stores)
}

pub fn load_snapshot(path: &Path) -> Result<Stores, SnapshotError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    load_str(&text)
}

/// Like [`load_snapshot`], but a missing file yields empty stores.
pub fn load_or_empty(path: &Path) -> Result<Stores, SnapshotError> {
    match fs::read_to_string(path) {
        Ok(text) => load_str(&text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Stores::new()),
        Err(e) => Err(io_error(path, e)),
    }
}

/// Writes the canonical dump next to `path` and renames it into place.
pub fn write_snapshot(path: &Path, stores: &Stores) -> Result<(), SnapshotError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(stores.dump().as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// Merges the records of `input` into the snapshot at `snapshot` (created if
/// absent). All-or-nothing: on any error the snapshot file is left as it was.
pub fn merge_into_snapshot(snapshot: &Path, input: &Path) -> Result<RecordCounts, SnapshotError> {
    let mut stores = load_or_empty(snapshot)?;
    let text = fs::read_to_string(input).map_err(|e| io_error(input, e))?;
    let counts = stores.apply_all(parse_records(&text)?)?;
    write_snapshot(snapshot, &stores)?;
    Ok(counts)
}
