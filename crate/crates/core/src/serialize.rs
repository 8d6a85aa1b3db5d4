//! Serialization of event streams into a single ordered boundary sequence.
//!
//! All matching runs over this form: every instance is flattened into its
//! start/end boundaries and the boundaries of all input streams are merged
//! into one deterministic total order. At equal times an end boundary comes
//! before a start boundary, so an interval that closes exactly when another
//! opens is observed closing first; remaining ties fall back to label and
//! instance id.

use std::collections::HashMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::model::{instance_boundaries, Boundary, EventInstance, EventStream};

/// A merged, ordered boundary sequence plus an index of the owning instances.
///
/// Boundaries keep their instance id rather than a copy of the instance, so
/// matching code can look up the full instance (in particular its end time)
/// when it needs to.
#[derive(Debug, Clone)]
pub struct SerializedStream {
    boundaries: Vec<Boundary>,
    instances: HashMap<String, EventInstance>,
    label_counts: HashMap<String, u64>,
}

impl SerializedStream {
    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    pub fn instance(&self, id: &str) -> Option<&EventInstance> {
        self.instances.get(id)
    }

    /// Number of event instances (not boundaries) carrying `label`.
    pub fn count_instances(&self, label: &str) -> u64 {
        self.label_counts.get(label).copied().unwrap_or(0)
    }

    /// Distinct labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self.label_counts.keys().cloned().collect();
        out.sort();
        out
    }

    pub fn num_boundaries(&self) -> usize {
        self.boundaries.len()
    }

    pub fn num_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }
}

/// Merges the instances of all input streams into one boundary sequence.
///
/// The result is invariant under permutation of the input streams and of the
/// instances within them. Instance ids must be unique across all inputs.
pub fn serialize(streams: &[EventStream]) -> Result<SerializedStream, SerializeError> {
    let mut instances: HashMap<String, EventInstance> = HashMap::new();
    let mut label_counts: HashMap<String, u64> = HashMap::new();
    let mut boundaries: Vec<Boundary> = Vec::new();

    for stream in streams {
        for e in stream.events() {
            if instances.contains_key(&e.id) {
                return Err(SerializeError::DuplicateInstanceId { id: e.id.clone() });
            }
            *label_counts.entry(e.label.clone()).or_insert(0) += 1;
            boundaries.extend(instance_boundaries(e));
            instances.insert(e.id.clone(), e.clone());
        }
    }

    boundaries.sort_by(|a, b| {
        (a.time, a.kind, &a.label, &a.instance_id).cmp(&(b.time, b.kind, &b.label, &b.instance_id))
    });

    Ok(SerializedStream {
        boundaries,
        instances,
        label_counts,
    })
}

/// Renders the boundary sequence as a relational string, joining consecutive
/// boundaries with `<` when time strictly increases and `=` when it is equal.
pub fn encode_relational(s: &SerializedStream) -> String {
    let mut out = String::new();
    for (i, b) in s.boundaries().iter().enumerate() {
        if i > 0 {
            let prev = &s.boundaries()[i - 1];
            out.push_str(if prev.time == b.time { " = " } else { " < " });
        }
        out.push_str(&format!("{}{}", b.label, b.kind));
    }
    out
}

/// Writes the boundary sequence as CSV with header
/// `time,kind,label,instance_id,stream_id`.
pub fn write_csv_dump(s: &SerializedStream, w: impl Write) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["time", "kind", "label", "instance_id", "stream_id"])?;
    for b in s.boundaries() {
        wtr.write_record([
            b.time.to_string().as_str(),
            b.kind.to_string().as_str(),
            &b.label,
            &b.instance_id,
            &b.stream_id,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SerializeError {
    #[error("duplicate instance id `{id}` across input streams")]
    DuplicateInstanceId { id: String },
}
