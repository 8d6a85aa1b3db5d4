//! Shared fixtures for the integration suites. Not every suite uses every
//! fixture, so dead-code warnings are suppressed here.
#![allow(dead_code)]

use cooccur_core::model::{EventInstance, EventStream, TimeInstant};

pub fn inst(id: &str, label: &str, start: Option<u64>, end: Option<u64>) -> EventInstance {
    EventInstance {
        id: id.to_string(),
        label: label.to_string(),
        start: start.map(TimeInstant),
        end: end.map(TimeInstant),
        stream_id: "s".to_string(),
    }
}

/// The eleven-instance example stream whose boundary encoding and pattern
/// counts are pinned throughout the test suites.
pub fn stream_s() -> EventStream {
    EventStream::new(
        "s",
        vec![
            inst("e01", "E1", Some(1), Some(5)),
            inst("e02", "E2", Some(8), Some(11)),
            inst("e03", "E3", Some(11), Some(18)),
            inst("e04", "E3", None, Some(22)),
            inst("e05", "E1", None, Some(30)),
            inst("e06", "E5", Some(35), Some(40)),
            inst("e07", "E6", Some(42), None),
            inst("e08", "E2", Some(53), Some(57)),
            inst("e09", "E1", None, Some(60)),
            inst("e10", "E4", None, Some(71)),
            inst("e11", "E1", Some(73), Some(76)),
        ],
    )
    .expect("fixture stream is valid")
}
