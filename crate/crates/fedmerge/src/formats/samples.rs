//! Sample sets, one JSON record per collection.

use std::fmt::Write as _;
use std::path::Path;

use fedmerge_core::sampling::SampleSet;

use super::{read_text, records_error, write_text, FormatError, RecordError};

pub fn write_samples(samples: &[SampleSet], path: &Path) -> Result<(), FormatError> {
    let mut out = String::new();
    for s in samples {
        writeln!(out, "{}", serde_json::to_string(s).expect("sample sets serialize")).unwrap();
    }
    write_text(path, &out)
}

pub fn read_samples(path: &Path) -> Result<Vec<SampleSet>, FormatError> {
    let text = read_text(path)?;
    let mut samples = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str::<SampleSet>(line) {
            Ok(s) => samples.push(s),
            Err(e) => errors.push(RecordError { line: i + 1, message: e.to_string() }),
        }
    }
    if errors.is_empty() {
        Ok(samples)
    } else {
        Err(records_error(path, errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.jsonl");
        let samples = vec![
            SampleSet { source_id: "A01B".into(), doc_ids: vec!["d2".into(), "d1".into()], queries_issued: 3 },
            SampleSet { source_id: "H04L".into(), doc_ids: vec![], queries_issued: 0 },
        ];
        write_samples(&samples, &path).unwrap();
        assert_eq!(read_samples(&path).unwrap(), samples);
    }

    #[test]
    fn bad_line_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        std::fs::write(&path, "{\"source_id\":\"A\",\"doc_ids\":[],\"queries_issued\":0}\n{\"source_id\":1}\n").unwrap();
        let err = read_samples(&path).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }
}
