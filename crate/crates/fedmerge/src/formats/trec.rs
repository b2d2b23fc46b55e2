//! Four-column qrels and six-column run files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fedmerge_core::engine::{Entry, RankedList};
use fedmerge_core::eval::Qrels;

use super::{read_text, records_error, write_text, FormatError, RecordError};

/// `query_id 0 doc_id relevance`; relevance above zero marks a relevant
/// document. A query whose lines are all non-relevant is kept with an empty
/// set so evaluation can count it as skipped.
pub fn parse_qrels(text: &str) -> Result<Qrels, Vec<RecordError>> {
    let mut qrels = Qrels::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            continue;
        }
        let err = |message: String| RecordError { line: i + 1, message };
        if cols.len() != 4 {
            errors.push(err(format!("expected 4 columns, found {}", cols.len())));
            continue;
        }
        let Ok(rel) = cols[3].parse::<i64>() else {
            errors.push(err(format!("bad relevance `{}`", cols[3])));
            continue;
        };
        let set = qrels.entry(cols[0].to_string()).or_default();
        if rel > 0 {
            set.insert(cols[2].to_string());
        }
    }
    if errors.is_empty() {
        Ok(qrels)
    } else {
        Err(errors)
    }
}

pub fn load_qrels(path: &Path) -> Result<Qrels, FormatError> {
    parse_qrels(&read_text(path)?).map_err(|e| records_error(path, e))
}

/// `query_id Q0 doc_id rank score tag`, one line per entry.
pub fn format_run<'a>(lists: impl IntoIterator<Item = &'a RankedList>, tag: &str) -> String {
    let mut out = String::new();
    for list in lists {
        for e in &list.entries {
            // `{}` on f64 prints the shortest string that parses back exactly
            writeln!(out, "{} Q0 {} {} {} {}", list.query_id, e.doc_id, e.rank, e.score, tag).unwrap();
        }
    }
    out
}

pub fn write_run<'a>(lists: impl IntoIterator<Item = &'a RankedList>, path: &Path, tag: &str) -> Result<(), FormatError> {
    write_text(path, &format_run(lists, tag))
}

/// Parses a run file into one list per query. The tag becomes the list's
/// source id. Ranks must run 1, 2, ... within each query in file order.
pub fn parse_run(text: &str) -> Result<BTreeMap<String, RankedList>, Vec<RecordError>> {
    let mut runs: BTreeMap<String, RankedList> = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            continue;
        }
        let err = |message: String| RecordError { line: i + 1, message };
        if cols.len() != 6 {
            errors.push(err(format!("expected 6 columns, found {}", cols.len())));
            continue;
        }
        let (Ok(rank), Ok(score)) = (cols[3].parse::<usize>(), cols[4].parse::<f64>()) else {
            errors.push(err(format!("bad rank or score `{} {}`", cols[3], cols[4])));
            continue;
        };
        let list = runs.entry(cols[0].to_string()).or_insert_with(|| RankedList {
            query_id: cols[0].to_string(),
            source_id: cols[5].to_string(),
            entries: Vec::new(),
        });
        if rank != list.entries.len() + 1 {
            errors.push(err(format!("rank {rank} out of sequence for query `{}`", cols[0])));
            continue;
        }
        list.entries.push(Entry { doc_id: cols[2].to_string(), score, rank });
    }
    if errors.is_empty() {
        Ok(runs)
    } else {
        Err(errors)
    }
}

pub fn load_run(path: &Path) -> Result<BTreeMap<String, RankedList>, FormatError> {
    parse_run(&read_text(path)?).map_err(|e| records_error(path, e))
}
