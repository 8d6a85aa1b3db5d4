//! Detection and counting of temporal co-occurrence patterns between
//! interval and semi-interval events.
//!
//! Event instances carry a start and/or an end timestamp; instances whose
//! other boundary is unknown are *semi-intervals*. Streams are serialized
//! into a single time-ordered sequence of boundaries ([`serialize`]), over
//! which sequential patterns — chains of signed or unsigned event
//! components separated by inclusive time windows ([`pattern`]) — are
//! counted in one pass by a compiled timed automaton per pattern
//! ([`automaton`], [`engine`]). Counting is greedy: each pattern keeps a
//! single run that takes the earliest possible transitions, so counted
//! occurrences never share event instances.
//!
//! On top of counting sit pairwise co-occurrence scores and their
//! Δt-indexed matrices ([`cooccurrence`]), a seeded synthetic stream
//! generator with deliberately embedded patterns ([`datagen`]), JSONL/CSV
//! ingestion ([`stream_io`]), and a brute-force reference evaluator used
//! for differential testing ([`oracle`]).

pub mod automaton;
pub mod cooccurrence;
pub mod datagen;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod pattern;
pub mod serialize;
pub mod stream_io;

#[cfg(test)]
mod testutil;

pub use engine::{count_patterns, count_patterns_with_occurrences, CountResult, Occurrence};
pub use model::{
    Boundary, BoundaryKind, EventInstance, EventStream, TimeInstant, TimeWindow,
};
pub use pattern::{parse_pattern, parse_pattern_file, Pattern};
pub use serialize::{serialize, SerializedStream};
