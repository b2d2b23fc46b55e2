//! Line-delimited JSON corpora and topics with a configurable field map.

use std::collections::BTreeSet;
use std::path::Path;

use fedmerge_core::corpus::{CollectionSet, Document, TextFields, Topic};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{read_text, records_error, FormatError, RecordError};

/// Record keys holding each logical field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMap {
    pub doc_id: String,
    pub topic_id: String,
    pub title: String,
    pub abstract_text: String,
    pub description: String,
    pub claims: String,
    pub codes: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        Self {
            doc_id: "doc_id".into(),
            topic_id: "topic_id".into(),
            title: "title".into(),
            abstract_text: "abstract".into(),
            description: "description".into(),
            claims: "claims".into(),
            codes: "codes".into(),
        }
    }
}

/// Parsed records plus the ones that were rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub value: T,
    pub rejected: Vec<RecordError>,
}

fn id_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<String, String> {
    match obj.get(key) {
        Some(Value::String(s)) if !s.trim().is_empty() => Ok(s.trim().to_string()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(Value::String(_)) => Err(format!("empty `{key}`")),
        Some(_) => Err(format!("`{key}` must be a string")),
        None => Err(format!("missing `{key}`")),
    }
}

// Arrays of strings (e.g. one claim per element) are joined with spaces.
fn text_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<String, String> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| format!("`{key}` must hold strings")))
            .collect::<Result<Vec<_>, _>>()
            .map(|parts| parts.join(" ")),
        Some(_) => Err(format!("`{key}` must be a string")),
    }
}

fn codes_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Vec<String>, String> {
    let raw: Vec<String> = match obj.get(key) {
        None | Some(Value::Null) => return Err(format!("missing `{key}`")),
        Some(Value::String(s)) => s.split([',', ';']).map(str::to_owned).collect(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| format!("`{key}` must hold strings")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(format!("`{key}` must be a string or a list of strings")),
    };
    if raw.is_empty() {
        return Err(format!("empty `{key}`"));
    }
    Ok(raw)
}

fn text_fields(obj: &serde_json::Map<String, Value>, map: &FieldMap) -> Result<TextFields, String> {
    Ok(TextFields {
        title: text_field(obj, &map.title)?,
        abstract_text: text_field(obj, &map.abstract_text)?,
        description: text_field(obj, &map.description)?,
        claims: text_field(obj, &map.claims)?,
    })
}

fn for_each_record(
    text: &str,
    mut f: impl FnMut(&serde_json::Map<String, Value>) -> Result<(), String>,
) -> Vec<RecordError> {
    let mut rejected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let outcome = match serde_json::from_str::<Value>(line) {
            Ok(Value::Object(obj)) => f(&obj),
            Ok(_) => Err("record is not a JSON object".into()),
            Err(e) => Err(format!("invalid JSON: {e}")),
        };
        if let Err(message) = outcome {
            rejected.push(RecordError { line: i + 1, message });
        }
    }
    rejected
}

pub fn parse_corpus(text: &str, map: &FieldMap) -> Loaded<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = BTreeSet::new();
    let rejected = for_each_record(text, |obj| {
        let doc_id = id_field(obj, &map.doc_id)?;
        let codes = codes_field(obj, &map.codes)?;
        let doc = Document::new(doc_id, text_fields(obj, map)?, &codes).map_err(|e| e.to_string())?;
        if !seen.insert(doc.doc_id.clone()) {
            return Err(format!("duplicate doc_id `{}`", doc.doc_id));
        }
        docs.push(doc);
        Ok(())
    });
    Loaded { value: docs, rejected }
}

pub fn parse_topics(text: &str, map: &FieldMap) -> Loaded<Vec<Topic>> {
    let mut topics = Vec::new();
    let mut seen = BTreeSet::new();
    let rejected = for_each_record(text, |obj| {
        let topic_id = id_field(obj, &map.topic_id)?;
        let fields = text_fields(obj, map)?;
        if fields.is_empty() {
            return Err(format!("topic `{topic_id}` has no text"));
        }
        if !seen.insert(topic_id.clone()) {
            return Err(format!("duplicate topic_id `{topic_id}`"));
        }
        topics.push(Topic { topic_id, text: fields });
        Ok(())
    });
    Loaded { value: topics, rejected }
}

/// Loads a corpus and partitions it into collections. Malformed records
/// fail the load unless `skip_malformed` is set, in which case they are
/// returned in [`Loaded::rejected`].
pub fn load_corpus(path: &Path, map: &FieldMap, skip_malformed: bool) -> Result<Loaded<CollectionSet>, FormatError> {
    let parsed = parse_corpus(&read_text(path)?, map);
    if !skip_malformed && !parsed.rejected.is_empty() {
        return Err(records_error(path, parsed.rejected));
    }
    let set = CollectionSet::from_documents(parsed.value)
        .map_err(|source| FormatError::Corpus { path: path.into(), source })?;
    Ok(Loaded { value: set, rejected: parsed.rejected })
}

pub fn load_topics(path: &Path, map: &FieldMap, skip_malformed: bool) -> Result<Loaded<Vec<Topic>>, FormatError> {
    let parsed = parse_topics(&read_text(path)?, map);
    if !skip_malformed && !parsed.rejected.is_empty() {
        return Err(records_error(path, parsed.rejected));
    }
    Ok(parsed)
}
