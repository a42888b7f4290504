use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::rubric::Rating;
use super::EvalError;

/// Append-only ratings log, one JSON record per line. Each append is flushed
/// and synced before it returns. Supersession is resolved by readers.
#[derive(Debug)]
pub struct RatingStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl RatingStore {
    pub fn open(path: impl Into<PathBuf>) -> io::Result<Self> {
        let path = path.into();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(RatingStore { path, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, rating: &Rating) -> io::Result<()> {
        let mut line = serde_json::to_string(rating).expect("ratings serialize");
        line.push('\n');
        let mut file = self.file.lock().unwrap();
        file.write_all(line.as_bytes())?;
        file.flush()?;
        file.sync_data()
    }

    /// Every record in the log, oldest first.
    pub fn load(&self) -> Result<Vec<Rating>, EvalError> {
        let _guard = self.file.lock().unwrap();
        load_ratings(&self.path)
    }
}

/// Reads a ratings log; a missing file is an empty log.
pub fn load_ratings(path: &Path) -> Result<Vec<Rating>, EvalError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    crate::jsonl::read(path).map_err(|e| EvalError::Log(e.to_string()))
}

#[cfg(test)]
mod tests {
    use chrono::DateTime;

    use super::*;

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ratings.jsonl");
        assert!(load_ratings(&path).unwrap().is_empty());
        let store = RatingStore::open(&path).unwrap();
        let r = Rating::new("r1", "a1", 1, 0, DateTime::UNIX_EPOCH).unwrap();
        store.append(&r).unwrap();
        store.append(&r).unwrap();
        drop(store);
        let reopened = RatingStore::open(&path).unwrap();
        assert_eq!(reopened.load().unwrap(), vec![r.clone(), r]);
    }
}
