//! Core data model for interval and semi-interval events.
//!
//! An event instance carries a label and up to two timestamps. Complete
//! instances have both a start and an end; semi-intervals are missing one of
//! the two (an archival stream may record only when something began, or only
//! when it ceased). Every instance decomposes into at most two boundaries,
//! the atomic observations all downstream matching works on.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Discrete, non-negative point on the time axis, expressed in units of the
/// stream's granularity (minutes by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeInstant(pub u64);

impl TimeInstant {
    /// The instant `delta` units later. Saturates instead of overflowing so
    /// that a huge window upper bound behaves like "no deadline".
    pub fn offset(self, delta: u64) -> TimeInstant {
        TimeInstant(self.0.saturating_add(delta))
    }

    /// Gap from `earlier` up to `self`; `None` when `self` precedes it.
    pub fn gap_since(self, earlier: TimeInstant) -> Option<u64> {
        self.0.checked_sub(earlier.0)
    }
}

impl fmt::Display for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Inclusive window `[lower, upper]` constraining the gap between two
/// consecutive pattern components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    lower: u64,
    upper: u64,
}

impl TimeWindow {
    pub fn new(lower: u64, upper: u64) -> Result<TimeWindow, ModelError> {
        if lower > upper {
            return Err(ModelError::InvalidWindow { lower, upper });
        }
        Ok(TimeWindow { lower, upper })
    }

    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn upper(&self) -> u64 {
        self.upper
    }

    /// Whether `t` falls inside `[anchor + lower, anchor + upper]`.
    pub fn contains(&self, anchor: TimeInstant, t: TimeInstant) -> bool {
        t >= anchor.offset(self.lower) && t <= anchor.offset(self.upper)
    }

    /// Latest instant at which a boundary can still satisfy this window.
    pub fn deadline(&self, anchor: TimeInstant) -> TimeInstant {
        anchor.offset(self.upper)
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lower, self.upper)
    }
}

/// Which side of an instance a boundary marks.
///
/// `End` sorts before `Start` so that at equal times an expiring interval is
/// observed before a beginning one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryKind {
    End,
    Start,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryKind::Start => write!(f, "+"),
            BoundaryKind::End => write!(f, "-"),
        }
    }
}

/// A single timestamped observation: the start or end of one event instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub label: String,
    pub kind: BoundaryKind,
    pub time: TimeInstant,
    pub instance_id: String,
    pub stream_id: String,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}@{}", self.label, self.kind, self.time)
    }
}

/// One labeled event instance with at least one of its two timestamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventInstance {
    pub id: String,
    pub label: String,
    pub start: Option<TimeInstant>,
    pub end: Option<TimeInstant>,
    pub stream_id: String,
}

impl EventInstance {
    /// Start time, substituting the end for a start-less semi-interval.
    pub fn effective_start(&self) -> TimeInstant {
        self.start.or(self.end).expect("instance has a timestamp")
    }

    /// End time, substituting the start for an end-less semi-interval.
    pub fn effective_end(&self) -> TimeInstant {
        self.end.or(self.start).expect("instance has a timestamp")
    }

    /// Time the next window is measured from when this instance is matched
    /// through an unsigned pattern component: the end when known, else the
    /// single recorded timestamp.
    pub fn anchor_time(&self) -> TimeInstant {
        self.effective_end()
    }

    pub fn is_complete(&self) -> bool {
        self.start.is_some() && self.end.is_some()
    }
}

/// Unvalidated event record, e.g. one line of an input file.
#[derive(Debug, Clone, Default)]
pub struct RawEvent {
    pub label: String,
    pub start: Option<u64>,
    pub end: Option<u64>,
    pub id: Option<String>,
    pub stream: Option<String>,
}

/// Checks timestamp sanity and fills in identity defaults.
///
/// At least one timestamp must be present and a complete instance must not
/// end before it starts. Instances with `start == end` are legal.
pub fn validate_instance(
    raw: RawEvent,
    default_id: impl Into<String>,
    default_stream: impl Into<String>,
) -> Result<EventInstance, ModelError> {
    if raw.start.is_none() && raw.end.is_none() {
        return Err(ModelError::BothTimestampsMissing { label: raw.label });
    }
    if let (Some(s), Some(e)) = (raw.start, raw.end) {
        if s > e {
            return Err(ModelError::StartAfterEnd {
                label: raw.label,
                start: s,
                end: e,
            });
        }
    }
    Ok(EventInstance {
        id: raw.id.unwrap_or_else(|| default_id.into()),
        label: raw.label,
        start: raw.start.map(TimeInstant),
        end: raw.end.map(TimeInstant),
        stream_id: raw.stream.unwrap_or_else(|| default_stream.into()),
    })
}

/// Total order over instances: by effective start, then effective end, with
/// missing timestamps substituted by the present one; ties broken by label,
/// id and stream id so sorting is deterministic for any input permutation.
pub fn compare_instances(a: &EventInstance, b: &EventInstance) -> Ordering {
    (a.effective_start(), a.effective_end(), &a.label, &a.id, &a.stream_id).cmp(&(
        b.effective_start(),
        b.effective_end(),
        &b.label,
        &b.id,
        &b.stream_id,
    ))
}

/// The one or two boundaries of an instance, start first.
pub fn instance_boundaries(e: &EventInstance) -> Vec<Boundary> {
    let mut out = Vec::with_capacity(2);
    if let Some(s) = e.start {
        out.push(Boundary {
            label: e.label.clone(),
            kind: BoundaryKind::Start,
            time: s,
            instance_id: e.id.clone(),
            stream_id: e.stream_id.clone(),
        });
    }
    if let Some(t) = e.end {
        out.push(Boundary {
            label: e.label.clone(),
            kind: BoundaryKind::End,
            time: t,
            instance_id: e.id.clone(),
            stream_id: e.stream_id.clone(),
        });
    }
    out
}

/// A finite, ordered collection of event instances with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    pub id: String,
    events: Vec<EventInstance>,
}

impl EventStream {
    /// Builds a stream, sorting the instances into the canonical order and
    /// rejecting duplicate instance ids.
    pub fn new(id: impl Into<String>, mut events: Vec<EventInstance>) -> Result<EventStream, ModelError> {
        let mut seen = HashSet::with_capacity(events.len());
        for e in &events {
            if !seen.insert(e.id.as_str()) {
                return Err(ModelError::DuplicateInstanceId(e.id.clone()));
            }
        }
        drop(seen);
        events.sort_by(compare_instances);
        Ok(EventStream { id: id.into(), events })
    }

    pub fn events(&self) -> &[EventInstance] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("event `{label}` has neither a start nor an end timestamp")]
    BothTimestampsMissing { label: String },
    #[error("event `{label}` starts at {start}, after its end at {end}")]
    StartAfterEnd { label: String, start: u64, end: u64 },
    #[error("window [{lower},{upper}] has its lower bound above its upper bound")]
    InvalidWindow { lower: u64, upper: u64 },
    #[error("duplicate instance id `{0}`")]
    DuplicateInstanceId(String),
}
