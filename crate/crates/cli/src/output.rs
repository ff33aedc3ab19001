//! CSV and manifest writers. Every file is written to a temporary sibling
//! and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use rydcoh_core::analysis::FitResult;
use rydcoh_core::noise::EnsembleResult;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::{Failure, Outcome};

/// Floats with 17 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::io(path, e)
    })
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Io(format!("csv encoding: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Failure::Io(format!("csv encoding: {e}")))
}

/// Collects the files of one command and the manifest that lists them.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Outcome<Self> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        Ok(OutputDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Outcome<()> {
        write_atomic(&self.path(name), bytes)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<()> {
        let bytes = csv_bytes(header, rows)?;
        self.write(name, &bytes)
    }

    pub fn write_result(&mut self, r: &EnsembleResult) -> Outcome<()> {
        let rows = (0..r.len()).map(|k| vec![float(r.scan_values[k]), float(r.mean_observable[k]), float(r.standard_error[k])]);
        self.write_csv("result.csv", &["scan_value", "mean", "stderr"], rows)
    }

    /// One row per parameter, then the residual norm and reduced χ².
    pub fn write_fit(&mut self, f: &FitResult) -> Outcome<()> {
        let mut rows: Vec<Vec<String>> =
            f.names.iter().zip(&f.params).zip(&f.sigmas).map(|((n, v), s)| vec![n.clone(), float(*v), float(*s)]).collect();
        rows.push(vec!["residual_norm".into(), float(f.residual_norm), String::new()]);
        rows.push(vec!["reduced_chi_square".into(), float(f.reduced_chi_square), String::new()]);
        self.write_csv("fit.csv", &["parameter", "value", "sigma"], rows)
    }

    pub fn finish(mut self, manifest: Manifest) -> Outcome<PathBuf> {
        let mut manifest = manifest;
        manifest.finished = timestamp(Utc::now());
        manifest.outputs = std::mem::take(&mut self.written);
        let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| Failure::Io(format!("manifest encoding: {e}")))?;
        json.push(b'\n');
        let path = self.path("manifest.json");
        write_atomic(&path, &json)?;
        Ok(path)
    }
}

pub fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Run record stored next to the outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    /// SHA-256 of the canonical (key-sorted, compact) JSON of the input.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub rng: &'static str,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
    pub summary: serde_json::Map<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value, started: DateTime<Utc>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config_hash: canonical_hash(&config),
            config: canonical(&config),
            seed: None,
            shots: None,
            rng: rydcoh_core::noise::RNG_ALGORITHM,
            started: timestamp(started),
            finished: String::new(),
            outputs: Vec::new(),
            summary: serde_json::Map::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        if let Ok(v) = serde_json::to_value(value) {
            self.summary.insert(key.to_string(), v);
        }
    }
}

/// Recursively key-sorted copy of a JSON value.
pub fn canonical(value: &serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            let sorted: std::collections::BTreeMap<&String, Value> = map.iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().map(|(k, v)| (k.clone(), v)).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

/// SHA-256 of the compact serialization of the key-sorted value.
pub fn canonical_hash(value: &serde_json::Value) -> String {
    let text = serde_json::to_string(&canonical(value)).expect("JSON values always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(float(-0.375), "-3.7500000000000000e-1");
    }

    #[test]
    fn hash_ignores_key_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b": 1, "a": {"y": 2, "x": 3}}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"a": {"x": 3, "y": 2}, "b": 1}"#).unwrap();
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
        assert_eq!(canonical_hash(&a).len(), 64);
    }
}
