//! Reference evaluation of patterns by direct interpretation.
//!
//! This module re-derives pattern counts without the compiled automaton or
//! the waits index: a plain left-to-right scan for the greedy count, and a
//! depth-first enumeration for the set of all instance bindings. It exists
//! to cross-check the production engine, so it favours obviousness over
//! speed and refuses inputs past a configurable size cap.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::model::TimeInstant;
use crate::pattern::Pattern;
use crate::serialize::SerializedStream;

/// Input size limits for the reference evaluator.
#[derive(Debug, Clone, Copy)]
pub struct OracleCaps {
    /// Maximum number of boundaries in the serialized stream.
    pub max_boundaries: usize,
    /// Maximum number of instances per label mentioned by the pattern.
    pub max_instances_per_label: usize,
}

impl Default for OracleCaps {
    fn default() -> OracleCaps {
        OracleCaps { max_boundaries: 10_000, max_instances_per_label: 50 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} count {actual} exceeds the reference evaluator cap of {limit}")]
    CapExceeded { what: String, actual: usize, limit: usize },
}

/// Counts and bindings derived by the reference evaluator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Number of greedy, non-overlapping occurrences.
    pub greedy_count: u64,
    /// Instance ids bound by each greedy occurrence, in completion order.
    pub greedy_bindings: Vec<Vec<String>>,
    /// Every distinct instance-id tuple satisfying the pattern, regardless
    /// of overlap. Tuples are ordered by boundary position in the stream.
    pub all_bindings: BTreeSet<Vec<String>>,
}

/// Greedy occurrence count by direct interpretation.
pub fn oracle_count(
    s: &SerializedStream,
    p: &Pattern,
    caps: &OracleCaps,
) -> Result<u64, OracleError> {
    evaluate(s, p, caps).map(|r| r.greedy_count)
}

/// Every distinct instance binding of `p` in `s`, overlap allowed.
pub fn enumerate_occurrences(
    s: &SerializedStream,
    p: &Pattern,
    caps: &OracleCaps,
) -> Result<BTreeSet<Vec<String>>, OracleError> {
    evaluate(s, p, caps).map(|r| r.all_bindings)
}

/// Evaluates `p` against `s` by direct interpretation.
pub fn evaluate(
    s: &SerializedStream,
    p: &Pattern,
    caps: &OracleCaps,
) -> Result<OracleResult, OracleError> {
    if s.num_boundaries() > caps.max_boundaries {
        return Err(OracleError::CapExceeded {
            what: "boundary".to_string(),
            actual: s.num_boundaries(),
            limit: caps.max_boundaries,
        });
    }
    for c in p.components() {
        let actual = s.count_instances(&c.label) as usize;
        if actual > caps.max_instances_per_label {
            return Err(OracleError::CapExceeded {
                what: format!("`{}` instance", c.label),
                actual,
                limit: caps.max_instances_per_label,
            });
        }
    }

    let (greedy_count, greedy_bindings) = greedy_scan(s, p);
    let mut all_bindings = BTreeSet::new();
    enumerate(s, p, 0, None, &mut Vec::new(), &mut all_bindings);
    Ok(OracleResult { greedy_count, greedy_bindings, all_bindings })
}

/// Single left-to-right pass keeping one partial match, exactly as a person
/// would tick components off on paper. `done` counts matched components.
fn greedy_scan(s: &SerializedStream, p: &Pattern) -> (u64, Vec<Vec<String>>) {
    let comps = p.components();
    let mut consumed: HashSet<String> = HashSet::new();
    let mut count = 0u64;
    let mut bindings = Vec::new();

    let mut done = 0usize;
    let mut anchor: Option<TimeInstant> = None;
    let mut partial: Vec<String> = Vec::new();

    for b in s.boundaries() {
        if done > 0 && b.time > p.windows()[done - 1].deadline(anchor.expect("anchored")) {
            done = 0;
            anchor = None;
            partial.clear();
        }
        let c = &comps[done];
        let fresh = !consumed.contains(&b.instance_id)
            && !partial.iter().any(|id| id == &b.instance_id);
        let in_window = match done {
            0 => true,
            _ => p.windows()[done - 1].contains(anchor.expect("anchored"), b.time),
        };
        if c.matches(b) && fresh && in_window {
            let owner = s.instance(&b.instance_id).expect("owner is indexed");
            partial.push(b.instance_id.clone());
            anchor = Some(c.anchor_for(b, owner));
            done += 1;
            if done == p.size() {
                count += 1;
                bindings.push(partial.clone());
                consumed.extend(partial.drain(..));
                done = 0;
                anchor = None;
            }
        }
    }
    (count, bindings)
}

/// Depth-first search over boundary positions, strictly increasing, one
/// component per level. Matching the start or the end boundary of the same
/// instance yields the same tuple, so results collapse into a set.
fn enumerate(
    s: &SerializedStream,
    p: &Pattern,
    from: usize,
    anchor: Option<TimeInstant>,
    tuple: &mut Vec<String>,
    out: &mut BTreeSet<Vec<String>>,
) {
    let depth = tuple.len();
    if depth == p.size() {
        out.insert(tuple.clone());
        return;
    }
    let c = &p.components()[depth];
    let boundaries = s.boundaries();
    for i in from..boundaries.len() {
        let b = &boundaries[i];
        if let Some(a) = anchor {
            let w = &p.windows()[depth - 1];
            if b.time > w.deadline(a) {
                // Boundaries are time-sorted, so nothing later can fit.
                break;
            }
            if !w.contains(a, b.time) {
                continue;
            }
        }
        if !c.matches(b) || tuple.iter().any(|id| id == &b.instance_id) {
            continue;
        }
        let owner = s.instance(&b.instance_id).expect("owner is indexed");
        tuple.push(b.instance_id.clone());
        enumerate(s, p, i + 1, Some(c.anchor_for(b, owner)), tuple, out);
        tuple.pop();
    }
}
