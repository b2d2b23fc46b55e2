//! File formats: record corpora, trec-style qrels and runs, sample sets and
//! checksummed artifacts.

use std::fmt;
use std::path::{Path, PathBuf};

mod artifact;
mod records;
mod samples;
mod trec;

pub use artifact::{load_artifact, load_index, load_model, save_artifact, save_index, save_model, ARTIFACT_VERSION};
pub use records::{load_corpus, load_topics, parse_corpus, parse_topics, FieldMap, Loaded};
pub use samples::{read_samples, write_samples};
pub use trec::{format_run, load_qrels, load_run, parse_qrels, parse_run, write_run};

/// A problem with one line of an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {} malformed record(s); {}", path.display(), errors.len(), summarize(errors))]
    Records { path: PathBuf, errors: Vec<RecordError> },
    #[error("{}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Corpus { path: PathBuf, source: fedmerge_core::corpus::CorpusError },
}

fn summarize(errors: &[RecordError]) -> String {
    const SHOWN: usize = 5;
    let mut s = errors.iter().take(SHOWN).map(ToString::to_string).collect::<Vec<_>>().join("; ");
    if errors.len() > SHOWN {
        s.push_str(&format!("; ... {} more", errors.len() - SHOWN));
    }
    s
}

pub(crate) fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.into(), source })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.into(), source })?;
    }
    std::fs::write(path, text).map_err(|source| FormatError::Io { path: path.into(), source })
}

fn records_error(path: &Path, errors: Vec<RecordError>) -> FormatError {
    FormatError::Records { path: path.into(), errors }
}
