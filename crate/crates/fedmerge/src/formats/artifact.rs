//! Versioned, checksummed JSON artifacts (indexes, models, caches).
//!
//! Layout: one header line `fedmerge-artifact <version> <kind> <sha256>`
//! followed by the JSON payload the digest covers.

use std::path::Path;

use fedmerge_core::engine::Index;
use fedmerge_core::mlmodels::MergeModel;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{read_text, write_text, FormatError};
use crate::hashing::sha256_hex;

pub const ARTIFACT_VERSION: u32 = 1;
const MAGIC: &str = "fedmerge-artifact";

fn bad(path: &Path, message: impl Into<String>) -> FormatError {
    FormatError::Artifact { path: path.into(), message: message.into() }
}

pub fn save_artifact<T: Serialize>(path: &Path, kind: &str, value: &T) -> Result<(), FormatError> {
    let payload = serde_json::to_string(value).map_err(|e| bad(path, e.to_string()))?;
    let header = format!("{MAGIC} {ARTIFACT_VERSION} {kind} {}", sha256_hex(payload.as_bytes()));
    write_text(path, &format!("{header}\n{payload}"))
}

pub fn load_artifact<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T, FormatError> {
    let text = read_text(path)?;
    let (header, payload) = text.split_once('\n').ok_or_else(|| bad(path, "missing artifact header"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let [magic, version, found_kind, digest] = fields[..] else {
        return Err(bad(path, "malformed artifact header"));
    };
    if magic != MAGIC {
        return Err(bad(path, "not a fedmerge artifact"));
    }
    if version != ARTIFACT_VERSION.to_string() {
        return Err(bad(path, format!("unsupported artifact version {version}")));
    }
    if found_kind != kind {
        return Err(bad(path, format!("expected a `{kind}` artifact, found `{found_kind}`")));
    }
    if sha256_hex(payload.as_bytes()) != digest {
        return Err(bad(path, "checksum mismatch"));
    }
    serde_json::from_str(payload).map_err(|e| bad(path, e.to_string()))
}

pub fn save_index(path: &Path, index: &Index) -> Result<(), FormatError> {
    save_artifact(path, "index", index)
}

/// Loads an index and checks its internal invariants.
pub fn load_index(path: &Path) -> Result<Index, FormatError> {
    let index: Index = load_artifact(path, "index")?;
    index.validate().map_err(|e| bad(path, e.to_string()))?;
    Ok(index)
}

pub fn save_model(path: &Path, model: &MergeModel) -> Result<(), FormatError> {
    save_artifact(path, "model", model)
}

pub fn load_model(path: &Path) -> Result<MergeModel, FormatError> {
    load_artifact(path, "model")
}
