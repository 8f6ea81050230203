//! On-disk bundle: `manifest.json` plus `embeddings.jsonl`.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{concept_key, EmbeddingRecord};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const EMBEDDINGS_FILE: &str = "embeddings.jsonl";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub name: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub model_name: String,
    pub format_version: u32,
    pub encoders: Vec<EncoderSpec>,
    pub record_count: usize,
}

impl BundleManifest {
    pub fn dim_of(&self, encoder: &str) -> Option<usize> {
        self.encoders.iter().find(|e| e.name == encoder).map(|e| e.dim)
    }

    fn check(&self) -> Result<(), StoreError> {
        if self.format_version != FORMAT_VERSION {
            return Err(StoreError::InvalidManifest(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.encoders.is_empty() {
            return Err(StoreError::InvalidManifest("no encoders declared".into()));
        }
        let mut seen = HashSet::new();
        for enc in &self.encoders {
            if enc.dim < 2 {
                return Err(StoreError::InvalidManifest(format!(
                    "encoder '{}' has dimension {} (must be >= 2)",
                    enc.name, enc.dim
                )));
            }
            if !seen.insert(enc.name.as_str()) {
                return Err(StoreError::InvalidManifest(format!(
                    "encoder '{}' declared twice",
                    enc.name
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoreError {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("failed to read {}: {reason}", path.display())]
    Io { path: PathBuf, reason: String },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("record '{id}': vector has {found} entries, encoder '{encoder}' declares {expected}")]
    DimensionMismatch {
        id: String,
        encoder: String,
        expected: usize,
        found: usize,
    },
    #[error("record '{0}': zero vector")]
    ZeroVector(String),
    #[error("record '{id}': encoder '{encoder}' is not declared in the manifest")]
    UnknownEncoder { id: String, encoder: String },
    #[error("record id '{0}' appears more than once")]
    DuplicateId(String),
    #[error("manifest declares {declared} records, embeddings file holds {found}")]
    RecordCountMismatch { declared: usize, found: usize },
}

impl StoreError {
    /// Variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            StoreError::MissingFile(_) => "MissingFile",
            StoreError::Io { .. } => "Io",
            StoreError::InvalidManifest(_) => "InvalidManifest",
            StoreError::MalformedRecord { .. } => "MalformedRecord",
            StoreError::DimensionMismatch { .. } => "DimensionMismatch",
            StoreError::ZeroVector(_) => "ZeroVector",
            StoreError::UnknownEncoder { .. } => "UnknownEncoder",
            StoreError::DuplicateId(_) => "DuplicateId",
            StoreError::RecordCountMismatch { .. } => "RecordCountMismatch",
        }
    }
}

/// Everything found while scanning a bundle. `load_bundle` fails on the first
/// finding; a scan keeps them all.
#[derive(Debug, Clone, Default)]
pub struct BundleScan {
    pub manifest: Option<BundleManifest>,
    pub records: Vec<EmbeddingRecord>,
    pub findings: Vec<StoreError>,
}

fn io_err(path: &Path, e: std::io::Error) -> StoreError {
    if e.kind() == std::io::ErrorKind::NotFound {
        StoreError::MissingFile(path.to_path_buf())
    } else {
        StoreError::Io {
            path: path.to_path_buf(),
            reason: e.to_string(),
        }
    }
}

pub fn read_manifest(dir: &Path) -> Result<BundleManifest, StoreError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let manifest: BundleManifest = serde_json::from_str(&text)
        .map_err(|e| StoreError::InvalidManifest(e.to_string()))?;
    manifest.check()?;
    Ok(manifest)
}

fn check_record(
    rec: &EmbeddingRecord,
    line: usize,
    manifest: &BundleManifest,
) -> Result<(), StoreError> {
    let Some(dim) = manifest.dim_of(&rec.encoder) else {
        return Err(StoreError::UnknownEncoder {
            id: rec.id.clone(),
            encoder: rec.encoder.clone(),
        });
    };
    if rec.vector.len() != dim {
        return Err(StoreError::DimensionMismatch {
            id: rec.id.clone(),
            encoder: rec.encoder.clone(),
            expected: dim,
            found: rec.vector.len(),
        });
    }
    if rec.vector.iter().any(|x| !x.is_finite()) {
        return Err(StoreError::MalformedRecord {
            line,
            reason: format!("record '{}' has a non-finite component", rec.id),
        });
    }
    if !(rec.norm() > 0.0) {
        return Err(StoreError::ZeroVector(rec.id.clone()));
    }
    let tagged = rec.category.is_some() && rec.dominance.is_some();
    let untagged = rec.category.is_none() && rec.dominance.is_none();
    if rec.role.is_attribute() && !untagged {
        return Err(StoreError::MalformedRecord {
            line,
            reason: format!("attribute record '{}' carries category/dominance", rec.id),
        });
    }
    if !rec.role.is_attribute() && !tagged {
        return Err(StoreError::MalformedRecord {
            line,
            reason: format!("target record '{}' lacks category or dominance", rec.id),
        });
    }
    if rec.concept.trim().is_empty() {
        return Err(StoreError::MalformedRecord {
            line,
            reason: format!("record '{}' has an empty concept", rec.id),
        });
    }
    Ok(())
}

/// Scans a bundle directory, collecting every problem instead of stopping.
pub fn scan_bundle(dir: &Path) -> BundleScan {
    let mut scan = BundleScan::default();
    let manifest = match read_manifest(dir) {
        Ok(m) => m,
        Err(e) => {
            scan.findings.push(e);
            return scan;
        }
    };
    let path = dir.join(EMBEDDINGS_FILE);
    let file = match fs::File::open(&path) {
        Ok(f) => f,
        Err(e) => {
            scan.findings.push(io_err(&path, e));
            scan.manifest = Some(manifest);
            return scan;
        }
    };
    let mut ids = HashSet::new();
    let mut found = 0usize;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                scan.findings.push(io_err(&path, e));
                break;
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        found += 1;
        let mut rec: EmbeddingRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                scan.findings.push(StoreError::MalformedRecord {
                    line: line_no,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if let Err(e) = check_record(&rec, line_no, &manifest) {
            scan.findings.push(e);
            continue;
        }
        if !ids.insert(rec.id.clone()) {
            scan.findings.push(StoreError::DuplicateId(rec.id.clone()));
            continue;
        }
        rec.concept = concept_key(&rec.concept);
        scan.records.push(rec);
    }
    if found != manifest.record_count {
        scan.findings.push(StoreError::RecordCountMismatch {
            declared: manifest.record_count,
            found,
        });
    }
    scan.manifest = Some(manifest);
    scan
}

/// Loads and validates a bundle directory. Vectors are kept as `f64`.
pub fn load_bundle(dir: &Path) -> Result<(BundleManifest, Vec<EmbeddingRecord>), StoreError> {
    let mut scan = scan_bundle(dir);
    if !scan.findings.is_empty() {
        return Err(scan.findings.swap_remove(0));
    }
    let manifest = scan.manifest.expect("manifest present when there are no findings");
    Ok((manifest, scan.records))
}

/// One JSON object per line, numbers in shortest round-trip form.
pub fn encode_records(records: &[EmbeddingRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        out.push_str(&serde_json::to_string(rec).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_bundle(
    dir: &Path,
    manifest: &BundleManifest,
    records: &[EmbeddingRecord],
) -> Result<(), StoreError> {
    let wrap = |path: &Path| {
        let path = path.to_path_buf();
        move |e: std::io::Error| StoreError::Io {
            path: path.clone(),
            reason: e.to_string(),
        }
    };
    fs::create_dir_all(dir).map_err(wrap(dir))?;
    let mpath = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&mpath, text).map_err(wrap(&mpath))?;
    let epath = dir.join(EMBEDDINGS_FILE);
    let mut f = fs::File::create(&epath).map_err(wrap(&epath))?;
    f.write_all(encode_records(records).as_bytes())
        .map_err(wrap(&epath))?;
    Ok(())
}

/// Builds a manifest whose counts and dimensions match `records`.
pub fn manifest_for(model_name: &str, records: &[EmbeddingRecord]) -> BundleManifest {
    let mut dims: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        dims.entry(r.encoder.as_str()).or_insert(r.vector.len());
    }
    BundleManifest {
        model_name: model_name.to_string(),
        format_version: FORMAT_VERSION,
        encoders: dims
            .into_iter()
            .map(|(name, dim)| EncoderSpec {
                name: name.to_string(),
                dim,
            })
            .collect(),
        record_count: records.len(),
    }
}
