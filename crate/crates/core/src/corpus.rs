//! Response corpora: the immutable record model, JSONL ingestion, and the
//! dimension registry that grids pivot on.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Label used when a record does not name its model or prompt template.
pub const DEFAULT_LABEL: &str = "default";

pub const MODEL: &str = "model";
pub const PROMPT_TEMPLATE: &str = "prompt_template";
pub const GEN_INDEX: &str = "gen_index";
pub const TEMPERATURE: &str = "temperature";

const BUILTIN_DIMENSIONS: [&str; 4] = [MODEL, PROMPT_TEMPLATE, GEN_INDEX, TEMPERATURE];
const KNOWN_KEYS: [&str; 8] = [
    "id",
    "text",
    MODEL,
    PROMPT_TEMPLATE,
    "vars",
    GEN_INDEX,
    TEMPERATURE,
    "extra",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: malformed JSON")]
    Malformed { line: usize },
    #[error("line {line}: expected a JSON object")]
    NotAnObject { line: usize },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: field `{field}` {reason}")]
    InvalidField {
        line: usize,
        field: String,
        reason: &'static str,
    },
    #[error("line {line}: variable `{name}` shadows a built-in dimension")]
    ReservedVar { line: usize, name: String },
    #[error("duplicate response id `{0}`")]
    DuplicateId(String),
    #[error("response `{0}` has empty text")]
    EmptyText(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{dimension}` has no value `{value}`")]
    UnknownValue { dimension: String, value: String },
    #[error("read error: {0}")]
    Io(String),
}

/// One LLM response together with every dimension a view can pivot on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub id: String,
    pub text: String,
    pub model: String,
    pub prompt_template: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vars: BTreeMap<String, String>,
    pub gen_index: u64,
    /// Kept as the original token and compared as a string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl ResponseRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        ResponseRecord {
            id: id.into(),
            text: text.into(),
            model: DEFAULT_LABEL.to_string(),
            prompt_template: DEFAULT_LABEL.to_string(),
            vars: BTreeMap::new(),
            gen_index: 0,
            temperature: None,
            extra: BTreeMap::new(),
        }
    }

    /// The record's value along `dimension`, if it has one.
    pub fn dimension_value(&self, dimension: &str) -> Option<Cow<'_, str>> {
        match dimension {
            MODEL => Some(Cow::Borrowed(&self.model)),
            PROMPT_TEMPLATE => Some(Cow::Borrowed(&self.prompt_template)),
            GEN_INDEX => Some(Cow::Owned(self.gen_index.to_string())),
            TEMPERATURE => self.temperature.as_deref().map(Cow::Borrowed),
            name => self.vars.get(name).map(|v| Cow::Borrowed(v.as_str())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    /// Distinct values in the order they were first observed.
    pub values: Vec<String>,
}

impl Dimension {
    pub fn contains(&self, value: &str) -> bool {
        self.values.iter().any(|v| v == value)
    }
}

/// An ordered, immutable collection of responses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    records: Vec<ResponseRecord>,
    dimensions: Vec<Dimension>,
}

impl Corpus {
    /// Builds a corpus from already-parsed records, checking id uniqueness
    /// and non-empty text.
    pub fn from_records(records: Vec<ResponseRecord>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(CorpusError::DuplicateId(r.id.clone()));
            }
            if r.text.trim().is_empty() {
                return Err(CorpusError::EmptyText(r.id.clone()));
            }
        }
        let dimensions = compute_dimensions(&records);
        Ok(Corpus {
            records,
            dimensions,
        })
    }

    pub fn records(&self) -> &[ResponseRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ResponseRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Dimension registry: model, prompt_template, gen_index, temperature
    /// (when any record carries one), then variables alphabetically.
    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    /// Sub-corpus of records matching every `dimension = value` entry.
    pub fn slice(&self, filter: &BTreeMap<String, String>) -> Result<Corpus, CorpusError> {
        for (name, value) in filter {
            let dim = self
                .dimension(name)
                .ok_or_else(|| CorpusError::UnknownDimension(name.clone()))?;
            if !dim.contains(value) {
                return Err(CorpusError::UnknownValue {
                    dimension: name.clone(),
                    value: value.clone(),
                });
            }
        }
        if filter.is_empty() {
            return Ok(self.clone());
        }
        let records: Vec<_> = self
            .records
            .iter()
            .filter(|r| {
                filter
                    .iter()
                    .all(|(k, v)| r.dimension_value(k).as_deref() == Some(v.as_str()))
            })
            .cloned()
            .collect();
        let dimensions = compute_dimensions(&records);
        Ok(Corpus {
            records,
            dimensions,
        })
    }

    /// Canonical JSON export: an array of record objects.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&self.records).expect("records serialize")
    }

    pub fn from_canonical_json(json: &str) -> Result<Corpus, CorpusError> {
        let records: Vec<ResponseRecord> =
            serde_json::from_str(json).map_err(|_| CorpusError::Malformed { line: 1 })?;
        Corpus::from_records(records)
    }

    /// One canonical record object per line; re-ingesting this output yields
    /// the same corpus.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Free-function form of [`Corpus::dimensions`].
pub fn dimensions(corpus: &Corpus) -> &[Dimension] {
    corpus.dimensions()
}

fn compute_dimensions(records: &[ResponseRecord]) -> Vec<Dimension> {
    if records.is_empty() {
        return Vec::new();
    }
    let var_names: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.vars.keys().map(String::as_str))
        .collect();
    BUILTIN_DIMENSIONS
        .iter()
        .copied()
        .chain(var_names)
        .filter_map(|name| {
            let mut values: Vec<String> = Vec::new();
            for r in records {
                if let Some(v) = r.dimension_value(name) {
                    if !values.iter().any(|x| *x == *v) {
                        values.push(v.into_owned());
                    }
                }
            }
            (!values.is_empty()).then(|| Dimension {
                name: name.to_string(),
                values,
            })
        })
        .collect()
}

/// Reads one JSON object per line. Blank lines are skipped but still count
/// towards line numbers.
pub fn ingest_jsonl<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    let mut gen_counters: HashMap<(String, String, BTreeMap<String, String>), u64> =
        HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => CorpusError::InvalidField {
                line: lineno,
                field: "<line>".into(),
                reason: "is not valid UTF-8",
            },
            _ => CorpusError::Io(e.to_string()),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(&line).map_err(|_| CorpusError::Malformed { line: lineno })?;
        let Value::Object(obj) = value else {
            return Err(CorpusError::NotAnObject { line: lineno });
        };
        let mut record = parse_record(lineno, obj)?;
        let group = (
            record.model.clone(),
            record.prompt_template.clone(),
            record.vars.clone(),
        );
        let counter = gen_counters.entry(group).or_insert(0);
        if record.gen_index == u64::MAX {
            record.gen_index = *counter;
        }
        *counter += 1;
        records.push(record);
    }
    Corpus::from_records(records)
}

pub fn ingest_str(text: &str) -> Result<Corpus, CorpusError> {
    ingest_jsonl(text.as_bytes())
}

fn parse_record(line: usize, mut obj: Map<String, Value>) -> Result<ResponseRecord, CorpusError> {
    let id = match obj.remove("id") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(invalid(line, "id", "must be a string")),
        None => return Err(CorpusError::MissingField { line, field: "id" }),
    };
    let text = match obj.remove("text") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(invalid(line, "text", "must be a string")),
        None => return Err(CorpusError::MissingField { line, field: "text" }),
    };
    let model = optional_label(line, MODEL, obj.remove(MODEL))?;
    let prompt_template = optional_label(line, PROMPT_TEMPLATE, obj.remove(PROMPT_TEMPLATE))?;

    let mut vars = BTreeMap::new();
    match obj.remove("vars") {
        None | Some(Value::Null) => {}
        Some(Value::Object(m)) => {
            for (k, v) in m {
                if BUILTIN_DIMENSIONS.contains(&k.as_str()) {
                    return Err(CorpusError::ReservedVar { line, name: k });
                }
                let v = scalar_string(&v)
                    .ok_or_else(|| invalid(line, &format!("vars.{k}"), "must be a scalar"))?;
                vars.insert(k, v);
            }
        }
        Some(_) => return Err(invalid(line, "vars", "must be an object")),
    }

    // u64::MAX marks "not given"; the caller assigns it.
    let gen_index = match obj.remove(GEN_INDEX) {
        None | Some(Value::Null) => u64::MAX,
        Some(Value::Number(n)) => match n.as_u64() {
            Some(g) if g < u64::MAX => g,
            _ => return Err(invalid(line, GEN_INDEX, "must be a non-negative integer")),
        },
        Some(_) => return Err(invalid(line, GEN_INDEX, "must be a non-negative integer")),
    };

    let temperature = match obj.remove(TEMPERATURE) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s),
        Some(Value::Number(n)) => Some(n.to_string()),
        Some(_) => return Err(invalid(line, TEMPERATURE, "must be a number or string")),
    };

    let mut extra = BTreeMap::new();
    match obj.remove("extra") {
        None | Some(Value::Null) => {}
        Some(Value::Object(m)) => {
            for (k, v) in m {
                extra.insert(k, opaque_string(&v));
            }
        }
        Some(other) => {
            extra.insert("extra".to_string(), opaque_string(&other));
        }
    }
    for (k, v) in obj {
        debug_assert!(!KNOWN_KEYS.contains(&k.as_str()));
        extra.insert(k, opaque_string(&v));
    }

    Ok(ResponseRecord {
        id,
        text,
        model,
        prompt_template,
        vars,
        gen_index,
        temperature,
        extra,
    })
}

fn invalid(line: usize, field: &str, reason: &'static str) -> CorpusError {
    CorpusError::InvalidField {
        line,
        field: field.to_string(),
        reason,
    }
}

fn optional_label(line: usize, field: &str, v: Option<Value>) -> Result<String, CorpusError> {
    match v {
        None | Some(Value::Null) => Ok(DEFAULT_LABEL.to_string()),
        Some(v) => scalar_string(&v).ok_or_else(|| invalid(line, field, "must be a scalar")),
    }
}

fn scalar_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn opaque_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
