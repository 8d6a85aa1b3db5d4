//! Property suite: structural laws that must hold for arbitrary streams
//! and patterns, not just the pinned examples.

use proptest::prelude::*;

use cooccur_core::engine::{count_patterns, count_patterns_with_occurrences};
use cooccur_core::model::{
    instance_boundaries, BoundaryKind, EventInstance, EventStream, TimeInstant, TimeWindow,
};
use cooccur_core::oracle::{evaluate, OracleCaps};
use cooccur_core::pattern::{format_pattern, parse_pattern, ComponentSign, Pattern, PatternComponent};
use cooccur_core::serialize::serialize;
use cooccur_core::cooccurrence::{build_matrix, MatrixSpec};

const LABELS: [&str; 5] = ["A", "B", "C", "D", "E"];

#[derive(Debug, Clone)]
struct RawInst {
    label: usize,
    start: u64,
    duration: u64,
    shape: u8,
}

fn arb_instance() -> impl Strategy<Value = RawInst> {
    (0..LABELS.len(), 0u64..300, 0u64..40, 0u8..4).prop_map(|(label, start, duration, shape)| {
        RawInst { label, start, duration, shape }
    })
}

fn build_instances(raw: Vec<RawInst>) -> Vec<EventInstance> {
    raw.iter()
        .enumerate()
        .map(|(i, r)| {
            let start = TimeInstant(r.start);
            let end = TimeInstant(r.start + r.duration);
            // shape 0..=1: complete; 2: start only; 3: end only.
            let (s, e) = match r.shape {
                2 => (Some(start), None),
                3 => (None, Some(end)),
                _ => (Some(start), Some(end)),
            };
            EventInstance {
                id: format!("i{i}"),
                label: LABELS[r.label].to_string(),
                start: s,
                end: e,
                stream_id: "s".to_string(),
            }
        })
        .collect()
}

fn arb_stream() -> impl Strategy<Value = Vec<EventInstance>> {
    prop::collection::vec(arb_instance(), 0..60).prop_map(build_instances)
}

fn arb_component() -> impl Strategy<Value = PatternComponent> {
    (0..LABELS.len(), 0u8..3).prop_map(|(label, sign)| PatternComponent {
        label: LABELS[label].to_string(),
        sign: match sign {
            0 => ComponentSign::Any,
            1 => ComponentSign::Start,
            _ => ComponentSign::End,
        },
    })
}

fn arb_pattern() -> impl Strategy<Value = Pattern> {
    (
        prop::collection::vec(arb_component(), 1..=3),
        prop::collection::vec((0u64..=25, 0u64..=25), 2),
    )
        .prop_map(|(components, bounds)| {
            let windows = bounds[..components.len() - 1]
                .iter()
                .map(|&(lo, extra)| TimeWindow::new(lo, lo + extra).unwrap())
                .collect();
            Pattern::new(components, windows, None).unwrap()
        })
}

proptest! {
    /// The serialized stream has one boundary per known timestamp and is
    /// sorted by time with ends preceding starts at equal times.
    #[test]
    fn serialization_is_complete_and_ordered(events in arb_stream()) {
        let expected: usize = events.iter().map(|e| instance_boundaries(e).len()).sum();
        let stream = EventStream::new("s", events).unwrap();
        let s = serialize(std::slice::from_ref(&stream)).unwrap();
        prop_assert_eq!(s.num_boundaries(), expected);
        for pair in s.boundaries().windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            prop_assert!(a.time <= b.time);
            if a.time == b.time {
                prop_assert!(
                    !(a.kind == BoundaryKind::Start && b.kind == BoundaryKind::End),
                    "start {a} sorted before end {b}"
                );
            }
        }
    }

    /// How instances are grouped into input streams does not change the
    /// serialized sequence.
    #[test]
    fn serialization_ignores_stream_grouping(events in arb_stream(), split in 0usize..60) {
        let cut = split.min(events.len());
        let whole = serialize(&[EventStream::new("s", events.clone()).unwrap()]).unwrap();
        let left = EventStream::new("l", events[..cut].to_vec()).unwrap();
        let right = EventStream::new("r", events[cut..].to_vec()).unwrap();
        let parts = serialize(&[left, right]).unwrap();
        prop_assert_eq!(whole.boundaries(), parts.boundaries());
    }

    /// Formatting a pattern and parsing it back is the identity.
    #[test]
    fn format_then_parse_is_identity(p in arb_pattern()) {
        let text = format_pattern(&p);
        let reparsed = parse_pattern(&text).unwrap();
        prop_assert_eq!(reparsed.components(), p.components());
        prop_assert_eq!(reparsed.windows(), p.windows());
    }

    /// Counting invariants: the frequency equals the number of recorded
    /// occurrences; occurrences of one pattern never share instances; every
    /// recorded gap lies inside its declared window; the boundary-read
    /// counter equals the stream length.
    #[test]
    fn counts_occurrences_and_gaps_agree(
        events in arb_stream(),
        patterns in prop::collection::vec(arb_pattern(), 1..=3),
    ) {
        let s = serialize(&[EventStream::new("s", events).unwrap()]).unwrap();
        let result = count_patterns_with_occurrences(&s, &patterns);
        prop_assert_eq!(result.boundaries_read as usize, s.num_boundaries());
        let occurrences = result.occurrences.as_ref().unwrap();
        for (pi, p) in patterns.iter().enumerate() {
            prop_assert_eq!(result.frequencies[pi] as usize, occurrences[pi].len());
            let mut used = std::collections::HashSet::new();
            for occ in &occurrences[pi] {
                prop_assert_eq!(occ.instance_ids.len(), p.size());
                prop_assert_eq!(occ.gaps.len(), p.size() - 1);
                for id in &occ.instance_ids {
                    prop_assert!(used.insert(id.clone()), "instance {} reused", id);
                }
                for (k, gap) in occ.gaps.iter().enumerate() {
                    let w = &p.windows()[k];
                    prop_assert!(
                        w.lower() <= *gap && *gap <= w.upper(),
                        "gap {} outside [{}, {}]",
                        gap, w.lower(), w.upper()
                    );
                }
                for pair in occ.boundaries.windows(2) {
                    prop_assert!(pair[0].time <= pair[1].time);
                }
            }
        }
    }

    /// The engine agrees with the interpretive reference evaluator, and
    /// every engine occurrence appears in the exhaustive enumeration.
    #[test]
    fn engine_matches_reference(events in arb_stream(), p in arb_pattern()) {
        let s = serialize(&[EventStream::new("s", events).unwrap()]).unwrap();
        let caps = OracleCaps { max_boundaries: 10_000, max_instances_per_label: 200 };
        let reference = evaluate(&s, &p, &caps).unwrap();
        let result = count_patterns_with_occurrences(&s, std::slice::from_ref(&p));
        prop_assert_eq!(result.frequencies[0], reference.greedy_count);
        for occ in &result.occurrences.unwrap()[0] {
            prop_assert!(
                reference.all_bindings.contains(&occ.instance_ids),
                "engine binding {:?} missing from enumeration",
                occ.instance_ids
            );
        }
    }

    /// Matrix cells are probabilities or NA, with NA exactly on labels that
    /// never occur; and the matrix agrees with the scalar score.
    #[test]
    fn matrix_cells_are_bounded(events in arb_stream(), dt in 0u64..=50) {
        let s = serialize(&[EventStream::new("s", events).unwrap()]).unwrap();
        let labels: Vec<String> = LABELS.iter().map(|l| l.to_string()).collect();
        let m = build_matrix(&s, &MatrixSpec::auto(labels.clone(), dt));
        for (i, x) in labels.iter().enumerate() {
            for j in 0..labels.len() {
                match m.cell(i, j) {
                    Some(v) => {
                        prop_assert!((0.0..=1.0).contains(&v), "cell {v} out of range");
                        prop_assert!(s.count_instances(x) > 0);
                    }
                    None => prop_assert_eq!(s.count_instances(x), 0),
                }
            }
        }
    }

    /// A single-component pattern can never count more occurrences than the
    /// label has boundaries of the required kind.
    #[test]
    fn single_component_counts_are_capped(events in arb_stream(), c in arb_component()) {
        let stream = EventStream::new("s", events).unwrap();
        let per_sign: u64 = stream
            .events()
            .iter()
            .filter(|e| e.label == c.label)
            .map(|e| match c.sign {
                ComponentSign::Start => u64::from(e.start.is_some()),
                ComponentSign::End => u64::from(e.end.is_some()),
                ComponentSign::Any => 1,
            })
            .sum();
        let s = serialize(&[stream]).unwrap();
        let p = Pattern::new(vec![c], vec![], None).unwrap();
        let count = count_patterns(&s, &[p]).frequencies[0];
        prop_assert_eq!(count, per_sign);
    }
}
