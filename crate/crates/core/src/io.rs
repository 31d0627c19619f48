//! Artifact output: numeric formatting, CSV/JSON writers, and run
//! directories.
//!
//! Every writer goes through a temp-file-plus-rename so a crash never leaves
//! a half-written artifact, and every numeric payload is checked for finite
//! values before a byte hits disk.  JSON artifacts must not contain `null`:
//! `serde_json` silently maps non-finite floats to `null`, so the writer
//! walks the serialized tree and rejects any it finds.

use std::ffi::OsStr;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

/// Failure modes of the artifact writers.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Serialize(#[from] serde_json::Error),
    #[error("non-finite value in {what}")]
    NonFinite { what: String },
    #[error("column {column} has {got} rows, expected {want}")]
    ShapeMismatch { column: String, got: usize, want: usize },
    #[error("null at {path} in JSON artifact (non-finite float or missing field)")]
    NullInJson { path: String },
}

/// Formats with nine significant digits in scientific notation, the format
/// used for every numeric cell in CSV artifacts.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.8e}")
}

/// Writes `bytes` to `path` atomically: a sibling temp file is written in
/// full and then renamed over the target.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let mut tmp_name = path
        .file_name()
        .map(OsStr::to_os_string)
        .unwrap_or_else(|| "artifact".into());
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes a numeric table as CSV: one header row, then the columns zipped
/// row by row, each cell formatted by [`fmt_f64`].  All columns must have
/// equal length and contain only finite values.
pub fn write_csv(path: &Path, headers: &[&str], columns: &[Vec<f64>]) -> Result<(), IoError> {
    assert_eq!(headers.len(), columns.len(), "one header per column");
    let rows = columns.first().map_or(0, Vec::len);
    for (name, column) in headers.iter().zip(columns) {
        if column.len() != rows {
            return Err(IoError::ShapeMismatch {
                column: (*name).to_owned(),
                got: column.len(),
                want: rows,
            });
        }
        if let Some(i) = column.iter().position(|v| !v.is_finite()) {
            return Err(IoError::NonFinite { what: format!("column {name}, row {i}") });
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(headers)?;
    for row in 0..rows {
        writer.write_record(columns.iter().map(|c| fmt_f64(c[row])))?;
    }
    let bytes = writer.into_inner().expect("Vec sink cannot fail");
    atomic_write(path, &bytes)
}

/// Serializes `value` as pretty-printed JSON and writes it atomically.  The
/// serialized tree is rejected if it contains `null` anywhere, which is how
/// `serde_json` spells a non-finite float.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let tree = serde_json::to_value(value)?;
    reject_nulls(&tree, "$")?;
    let mut bytes = serde_json::to_vec_pretty(&tree)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

fn reject_nulls(value: &serde_json::Value, path: &str) -> Result<(), IoError> {
    use serde_json::Value;
    match value {
        Value::Null => Err(IoError::NullInJson { path: path.to_owned() }),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .try_for_each(|(i, item)| reject_nulls(item, &format!("{path}[{i}]"))),
        Value::Object(map) => map
            .iter()
            .try_for_each(|(key, item)| reject_nulls(item, &format!("{path}.{key}"))),
        _ => Ok(()),
    }
}

/// 64-bit FNV-1a hash, used to tag run directories by their configuration.
pub fn config_hash(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// First eight hex digits of the full 16-digit hash rendering.
pub fn short_hash(hash: u64) -> String {
    format!("{hash:016x}")[..8].to_owned()
}

/// Output root resolution: an explicit path wins, then the `PUCCI_LAB_OUT`
/// environment variable, then `runs` under the working directory.
pub(crate) fn resolve_root(explicit: Option<&Path>, env: Option<&OsStr>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| env.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// A per-run artifact directory named `{id}-{hash}`, where the hash tags the
/// exact configuration text stored inside as `config.txt`.
#[derive(Debug)]
pub struct RunDir {
    path: PathBuf,
}

impl RunDir {
    /// Creates the directory (and parents) and records the configuration.
    pub fn create(root: Option<&Path>, id: &str, config_text: &str) -> Result<Self, IoError> {
        let root = resolve_root(root, std::env::var_os("PUCCI_LAB_OUT").as_deref());
        let tag = short_hash(config_hash(config_text.as_bytes()));
        let path = root.join(format!("{id}-{tag}"));
        fs::create_dir_all(&path)?;
        atomic_write(&path.join("config.txt"), config_text.as_bytes())?;
        Ok(Self { path })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Path of an artifact inside the run directory.
    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    /// Removes the directory and everything in it; used when a run fails
    /// after partial output so no half-populated artifacts survive.
    pub fn discard(self) -> Result<(), IoError> {
        fs::remove_dir_all(&self.path)?;
        Ok(())
    }
}
