//! One-pass counting of pattern occurrences over a serialized stream.
//!
//! Every pattern keeps exactly one live run. Runs are indexed by the label
//! of the component they currently await, so each boundary only touches the
//! runs that could consume it. Per boundary the engine first retires every
//! live run whose deadline has lapsed (the reset run is re-indexed under its
//! first component and immediately offered the same boundary), then offers
//! the boundary to the runs waiting on its label. The resulting counts are
//! greedy: earliest possible transitions, non-overlapping occurrences.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::automaton::{AutomatonRun, CompiledAutomaton, StepOutcome};
use crate::model::Boundary;
use crate::pattern::Pattern;
use crate::serialize::SerializedStream;

/// Index from awaited label to the runs waiting for it.
#[derive(Debug, Default)]
pub struct WaitsIndex {
    map: HashMap<String, Vec<usize>>,
}

impl WaitsIndex {
    pub fn new() -> WaitsIndex {
        WaitsIndex::default()
    }

    pub fn add(&mut self, label: &str, run: usize) {
        self.map.entry(label.to_string()).or_default().push(run);
    }

    pub fn remove(&mut self, label: &str, run: usize) {
        if let Some(list) = self.map.get_mut(label) {
            if let Some(pos) = list.iter().position(|&r| r == run) {
                list.remove(pos);
                return;
            }
        }
        debug_assert!(false, "run {run} was not waiting on `{label}`");
    }

    /// Takes the whole waiting list for `label`; pair with `restore`.
    pub fn take(&mut self, label: &str) -> Vec<usize> {
        self.map.remove(label).unwrap_or_default()
    }

    pub fn restore(&mut self, label: &str, runs: Vec<usize>) {
        if runs.is_empty() {
            return;
        }
        match self.map.entry(label.to_string()) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let mut merged = runs;
                merged.extend(e.get().iter().copied());
                *e.get_mut() = merged;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(runs);
            }
        }
    }
}

/// One complete greedy occurrence of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    /// Index of the pattern in the counted list.
    pub pattern: usize,
    /// The matched boundary of each component, in component order.
    pub boundaries: Vec<Boundary>,
    /// Owning instance of each matched boundary.
    pub instance_ids: Vec<String>,
    /// Anchor-to-boundary gap for each window.
    pub gaps: Vec<u64>,
}

/// Result of one counting pass.
#[derive(Debug, Clone)]
pub struct CountResult {
    /// Occurrence frequency per input pattern.
    pub frequencies: Vec<u64>,
    /// Recorded occurrences per input pattern, when requested.
    pub occurrences: Option<Vec<Vec<Occurrence>>>,
    /// Number of boundaries read; always the length of the input sequence.
    pub boundaries_read: u64,
}

fn awaited_label<'a>(fsa: &'a CompiledAutomaton, run: &AutomatonRun) -> &'a str {
    &fsa.pattern().components()[run.position() - 1].label
}

fn make_occurrence(
    pattern: usize,
    fsa: &CompiledAutomaton,
    s: &SerializedStream,
    matched: &[(usize, Boundary)],
) -> Occurrence {
    let components = fsa.pattern().components();
    let mut boundaries = Vec::with_capacity(matched.len());
    let mut instance_ids = Vec::with_capacity(matched.len());
    let mut gaps = Vec::with_capacity(matched.len().saturating_sub(1));
    let mut prev_anchor = None;
    for (pos, b) in matched {
        let owner = s.instance(&b.instance_id).expect("boundary owner is indexed");
        if let Some(anchor) = prev_anchor {
            gaps.push(b.time.gap_since(anchor).expect("matched inside window"));
        }
        prev_anchor = Some(components[pos - 1].anchor_for(b, owner));
        boundaries.push(b.clone());
        instance_ids.push(b.instance_id.clone());
    }
    Occurrence { pattern, boundaries, instance_ids, gaps }
}

fn run_pass(s: &SerializedStream, patterns: &[Pattern], record: bool) -> CountResult {
    let automatons: Vec<CompiledAutomaton> =
        patterns.iter().map(CompiledAutomaton::compile).collect();
    let mut runs: Vec<AutomatonRun> = patterns.iter().map(|_| AutomatonRun::new()).collect();
    let mut waits = WaitsIndex::new();
    for (i, fsa) in automatons.iter().enumerate() {
        waits.add(fsa.pattern().first_label(), i);
    }

    let mut frequencies = vec![0u64; patterns.len()];
    let mut occurrences: Vec<Vec<Occurrence>> = vec![Vec::new(); patterns.len()];
    let mut boundaries_read = 0u64;

    for b in s.boundaries() {
        boundaries_read += 1;
        let owner = s.instance(&b.instance_id).expect("boundary owner is indexed");

        // Deadline check precedes matching: a lapsed run resets and is
        // re-indexed under its first component so this same boundary can
        // start its next attempt.
        for (i, run) in runs.iter_mut().enumerate() {
            if run.is_live() && run.deadline().is_some_and(|d| b.time > d) {
                let old_label = awaited_label(&automatons[i], run).to_string();
                let out = run.step(&automatons[i], b, owner);
                debug_assert_eq!(out, StepOutcome::Expired);
                waits.remove(&old_label, i);
                waits.add(automatons[i].pattern().first_label(), i);
            }
        }

        let waiting = waits.take(&b.label);
        let mut still_waiting = Vec::with_capacity(waiting.len());
        // Runs that moved to a new waited label are re-indexed after the
        // sweep over the snapshot, so an accepting run is not offered the
        // boundary it just consumed.
        let mut moved: Vec<(String, usize)> = Vec::new();
        for i in waiting {
            match runs[i].step(&automatons[i], b, owner) {
                StepOutcome::Skip => still_waiting.push(i),
                StepOutcome::Advance => {
                    moved.push((awaited_label(&automatons[i], &runs[i]).to_string(), i));
                }
                StepOutcome::Accept => {
                    frequencies[i] += 1;
                    if record {
                        occurrences[i].push(make_occurrence(i, &automatons[i], s, runs[i].matched()));
                    }
                    runs[i].reset_after_accept();
                    moved.push((automatons[i].pattern().first_label().to_string(), i));
                }
                StepOutcome::Expired => {
                    unreachable!("the deadline sweep retires lapsed runs before matching")
                }
            }
        }
        waits.restore(&b.label, still_waiting);
        for (label, i) in moved {
            waits.add(&label, i);
        }
    }

    CountResult {
        frequencies,
        occurrences: record.then_some(occurrences),
        boundaries_read,
    }
}

/// Counts the greedy occurrence frequency of every pattern in one pass.
pub fn count_patterns(s: &SerializedStream, patterns: &[Pattern]) -> CountResult {
    run_pass(s, patterns, false)
}

/// Like [`count_patterns`], additionally recording each occurrence.
pub fn count_patterns_with_occurrences(s: &SerializedStream, patterns: &[Pattern]) -> CountResult {
    run_pass(s, patterns, true)
}

/// The greedy occurrences of one pattern, in completion order.
pub fn list_occurrences(s: &SerializedStream, p: &Pattern) -> Vec<Occurrence> {
    let mut result = count_patterns_with_occurrences(s, std::slice::from_ref(p));
    result.occurrences.take().expect("recording pass").pop().expect("one pattern")
}

/// Frequencies of all prefixes of `p` (sizes `1..=N`), counted in the same
/// single pass over the stream.
pub fn count_prefixes(s: &SerializedStream, p: &Pattern) -> Vec<u64> {
    let prefixes: Vec<Pattern> = (1..=p.size())
        .map(|k| p.prefix(k).expect("k is in range"))
        .collect();
    count_patterns(s, &prefixes).frequencies
}

/// Writes recorded occurrences as CSV with header
/// `pattern,occurrence_index,component_index,label,kind,time,instance_id`.
/// Indices are 1-based.
pub fn write_occurrences_csv(
    patterns: &[Pattern],
    result: &CountResult,
    w: impl Write,
) -> io::Result<()> {
    let occurrences = result
        .occurrences
        .as_ref()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "occurrences were not recorded"))?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "pattern",
        "occurrence_index",
        "component_index",
        "label",
        "kind",
        "time",
        "instance_id",
    ])?;
    for (p, occs) in patterns.iter().zip(occurrences) {
        let name = p.display_name();
        for (oi, occ) in occs.iter().enumerate() {
            for (ci, b) in occ.boundaries.iter().enumerate() {
                wtr.write_record([
                    name.as_str(),
                    (oi + 1).to_string().as_str(),
                    (ci + 1).to_string().as_str(),
                    &b.label,
                    b.kind.to_string().as_str(),
                    b.time.to_string().as_str(),
                    &b.instance_id,
                ])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}
