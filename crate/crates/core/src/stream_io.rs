//! Reading and writing event streams as JSON Lines or CSV files.
//!
//! One file holds one stream. JSONL records look like
//! `{"type":"E1","start":1,"end":5}` with either timestamp omissible;
//! optional `id` and `stream` fields override the defaults derived from
//! the file name (`<file>:<line>` and the file stem). `#` lines and blank
//! lines are ignored, which lets generated files carry their parameter
//! header and manifests inline.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_instance, EventStream, ModelError, RawEvent};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{line}: invalid record: {message}")]
    Record { path: String, line: u64, message: String },
    #[error("{path}: {source}")]
    Stream { path: String, source: ModelError },
    #[error("{path}: unsupported input extension (expected .jsonl, .json or .csv)")]
    UnknownFormat { path: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRecord {
    #[serde(rename = "type")]
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stream: Option<String>,
}

/// Reads a stream file, choosing the format from the extension.
pub fn read_stream_path(path: &Path) -> Result<EventStream, IoError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| IoError::Io { path: display.clone(), source })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| display.clone());
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => read_jsonl(BufReader::new(file), &display, &stem),
        Some("csv") => read_csv(file, &display, &stem),
        _ => Err(IoError::UnknownFormat { path: display }),
    }
}

/// Reads JSON Lines. `path` labels diagnostics; `stem` seeds default ids
/// (`<stem>:<line>`) and the stream id.
pub fn read_jsonl<R: BufRead>(reader: R, path: &str, stem: &str) -> Result<EventStream, IoError> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|source| IoError::Io { path: path.to_string(), source })?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let record: JsonRecord = serde_json::from_str(text).map_err(|e| IoError::Record {
            path: path.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        let raw = RawEvent {
            label: record.label,
            start: record.start,
            end: record.end,
            id: record.id,
            stream: record.stream,
        };
        let event = validate_instance(raw, format!("{stem}:{line_no}"), stem).map_err(|e| {
            IoError::Record { path: path.to_string(), line: line_no, message: e.to_string() }
        })?;
        events.push(event);
    }
    EventStream::new(stem, events)
        .map_err(|source| IoError::Stream { path: path.to_string(), source })
}

/// Reads CSV with header `type,start,end` and optional `id`, `stream`
/// columns; empty cells stand for missing values. `#` comment lines are
/// skipped.
pub fn read_csv<R: Read>(reader: R, path: &str, stem: &str) -> Result<EventStream, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| IoError::Record { path: path.to_string(), line: 1, message: e.to_string() })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(c_label), Some(c_start), Some(c_end)) =
        (column("type"), column("start"), column("end"))
    else {
        return Err(IoError::Record {
            path: path.to_string(),
            line: 1,
            message: format!("header must contain type,start,end — got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    };
    let c_id = column("id");
    let c_stream = column("stream");

    let mut events = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| IoError::Record {
            path: path.to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let line_no = record.position().map(|p| p.line()).unwrap_or(0);
        let cell = |i: usize| record.get(i).filter(|v| !v.is_empty());
        let time = |i: usize, name: &str| -> Result<Option<u64>, IoError> {
            cell(i)
                .map(|v| {
                    v.parse::<u64>().map_err(|_| IoError::Record {
                        path: path.to_string(),
                        line: line_no,
                        message: format!("{name} `{v}` is not a non-negative integer"),
                    })
                })
                .transpose()
        };
        let raw = RawEvent {
            label: cell(c_label)
                .ok_or_else(|| IoError::Record {
                    path: path.to_string(),
                    line: line_no,
                    message: "missing type".to_string(),
                })?
                .to_string(),
            start: time(c_start, "start")?,
            end: time(c_end, "end")?,
            id: c_id.and_then(cell).map(str::to_string),
            stream: c_stream.and_then(cell).map(str::to_string),
        };
        let event = validate_instance(raw, format!("{stem}:{line_no}"), stem).map_err(|e| {
            IoError::Record { path: path.to_string(), line: line_no, message: e.to_string() }
        })?;
        events.push(event);
    }
    EventStream::new(stem, events)
        .map_err(|source| IoError::Stream { path: path.to_string(), source })
}

/// Writes a stream as JSON Lines, preceded by the given `#` header lines.
/// Identity fields are omitted: readers re-derive ids from file positions,
/// so regenerated files stay byte-identical.
pub fn write_jsonl<W: Write>(
    mut w: W,
    headers: &[String],
    stream: &EventStream,
) -> io::Result<()> {
    for h in headers {
        debug_assert!(h.starts_with('#'), "header lines must be comments");
        writeln!(w, "{h}")?;
    }
    for e in stream.events() {
        let record = JsonRecord {
            label: e.label.clone(),
            start: e.start.map(|t| t.0),
            end: e.end.map(|t| t.0),
            id: None,
            stream: None,
        };
        writeln!(w, "{}", serde_json::to_string(&record).expect("record serializes"))?;
    }
    Ok(())
}
