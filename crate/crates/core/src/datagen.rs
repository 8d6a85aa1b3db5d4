//! Synthetic event-stream generation with controllable noise, interval
//! completeness and deliberately embedded patterns.
//!
//! A single timer walks forward in small random increments. Each generated
//! event is either pure noise (uniform label at the timer) or one more
//! component of an embedded pattern, placed so its matching boundary falls
//! uniformly inside the component's window. Afterwards one boundary may be
//! erased to turn the interval into a semi-interval. The whole run is a
//! pure function of the configuration, including the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::model::{BoundaryKind, EventInstance, EventStream, TimeInstant};
use crate::pattern::{ComponentSign, Pattern};

/// Parameters of one generation run.
#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Number of event instances to produce.
    pub n: usize,
    /// Label vocabulary; noise labels are drawn uniformly from it.
    pub alphabet: Vec<String>,
    /// Probability that an instance keeps both boundaries.
    pub alpha: f64,
    /// Probability that an event is noise rather than pattern progress.
    pub beta: f64,
    /// Mean event duration in granularity units.
    pub mu: f64,
    /// Standard deviation of the event duration.
    pub sigma: f64,
    /// The timer advances by a uniform integer in `[1, max_increment]`.
    pub max_increment: u64,
    /// Time unit recorded in output headers; has no numeric effect.
    pub granularity: String,
    pub seed: u64,
    /// Patterns to embed; one partial occurrence per pattern is live at a
    /// time.
    pub embedded: Vec<Pattern>,
}

impl GenConfig {
    /// A pure-noise configuration over the default 22-label vocabulary:
    /// complete intervals, mean duration 10, timer steps of at most 5.
    pub fn new(n: usize, seed: u64) -> GenConfig {
        let mu = 10.0;
        GenConfig {
            n,
            alphabet: default_alphabet(22),
            alpha: 1.0,
            beta: 1.0,
            mu,
            sigma: mu / 4.0,
            max_increment: 5,
            granularity: "1min".to_string(),
            seed,
            embedded: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.alphabet.is_empty() {
            return Err(GenError::EmptyAlphabet);
        }
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GenError::InvalidProbability { name, value });
            }
        }
        if !self.mu.is_finite() || self.mu < 1.0 {
            return Err(GenError::InvalidMu(self.mu));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(GenError::InvalidSigma(self.sigma));
        }
        if self.max_increment < 1 {
            return Err(GenError::InvalidIncrement(self.max_increment));
        }
        for p in &self.embedded {
            for c in p.components() {
                if !self.alphabet.contains(&c.label) {
                    return Err(GenError::EmbeddedLabelNotInAlphabet {
                        label: c.label.clone(),
                        pattern: p.display_name(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// `E` followed by spreadsheet-style letters: `EA` through `EV` for the
/// default size of 22, continuing `EW, ..., EZ, EAA, EAB, ...` past 26.
pub fn default_alphabet(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("E{}", column_letters(i))).collect()
}

fn column_letters(mut i: usize) -> String {
    let mut letters = Vec::new();
    loop {
        letters.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    letters.reverse();
    String::from_utf8(letters).expect("ascii letters")
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("the alphabet must contain at least one label")]
    EmptyAlphabet,
    #[error("embedded pattern `{pattern}` uses label `{label}` which is not in the alphabet")]
    EmbeddedLabelNotInAlphabet { label: String, pattern: String },
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("mean duration must be finite and at least 1, got {0}")]
    InvalidMu(f64),
    #[error("duration standard deviation must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("max_increment must be at least 1, got {0}")]
    InvalidIncrement(u64),
    #[error("stream does not match this configuration: {0}")]
    ConfigMismatch(String),
}

/// Ground truth recorded while generating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenReport {
    pub per_pattern: Vec<EmbedCount>,
    pub noise_events: u64,
    pub deliberate_events: u64,
}

/// Embedding outcome of one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedCount {
    pub pattern: String,
    /// Occurrences whose every component was placed.
    pub completed: u64,
    /// Completed occurrences still matchable after boundary erasure.
    pub intact: u64,
}

struct GenEvent {
    label: String,
    start: Option<u64>,
    end: Option<u64>,
}

struct LivePartial {
    next: usize,
    anchor: TimeInstant,
    members: Vec<usize>,
}

/// Generates the stream; see [`generate_with_report`] for the ground truth.
pub fn generate(config: &GenConfig) -> Result<EventStream, GenError> {
    generate_with_report(config).map(|(stream, _)| stream)
}

/// Generates the stream together with its embedding report.
pub fn generate_with_report(config: &GenConfig) -> Result<(EventStream, GenReport), GenError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let duration_dist = Normal::new(config.mu, config.sigma).expect("validated sigma");

    let mut events: Vec<GenEvent> = Vec::with_capacity(config.n);
    let mut live: Vec<Option<LivePartial>> = config.embedded.iter().map(|_| None).collect();
    let mut finished: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut completed = vec![0u64; config.embedded.len()];
    let mut noise_events = 0u64;
    let mut deliberate_events = 0u64;
    let mut timer: u64 = 0;

    // Per event the RNG is consulted in a fixed order: duration, the
    // noise/pattern choice, the label or pattern details, the erasure pair,
    // and finally the timer increment. Changing this order changes every
    // seeded output, so it is part of the format.
    for _ in 0..config.n {
        let drawn = duration_dist.sample(&mut rng).round();
        let duration = if drawn < 1.0 { 1 } else { drawn as u64 };

        let is_noise = config.embedded.is_empty() || rng.gen_bool(config.beta);
        let (label, start, end) = if is_noise {
            noise_events += 1;
            let label = config.alphabet[rng.gen_range(0..config.alphabet.len())].clone();
            (label, timer, timer.saturating_add(duration))
        } else {
            deliberate_events += 1;
            let pi = rng.gen_range(0..config.embedded.len());
            let pattern = &config.embedded[pi];
            // A live partial continues only while its next window is still
            // reachable from the current timer; otherwise it is abandoned
            // and a fresh occurrence starts here.
            let slot = &mut live[pi];
            if let Some(partial) = slot {
                let window = &pattern.windows()[partial.next - 1];
                if TimeInstant(timer) > window.deadline(partial.anchor) {
                    *slot = None;
                }
            }
            let (index, target) = match slot {
                Some(partial) => {
                    let window = &pattern.windows()[partial.next - 1];
                    let lo = partial.anchor.offset(window.lower()).0;
                    let hi = partial.anchor.offset(window.upper()).0;
                    (partial.next, rng.gen_range(lo..=hi))
                }
                None => (0, timer),
            };
            let component = &pattern.components()[index];
            // The matching boundary sits exactly at `target`: the start for
            // a start-signed component, the end otherwise (an unsigned
            // component anchors at its instance end).
            let (start, end) = match component.sign {
                ComponentSign::Start => (target, target.saturating_add(duration)),
                ComponentSign::End | ComponentSign::Any => {
                    (target.saturating_sub(duration), target)
                }
            };
            let partial = slot.get_or_insert_with(|| LivePartial {
                next: 0,
                anchor: TimeInstant(target),
                members: Vec::with_capacity(pattern.size()),
            });
            partial.next = index + 1;
            partial.anchor = TimeInstant(target);
            partial.members.push(events.len());
            if partial.next == pattern.size() {
                completed[pi] += 1;
                finished.push((pi, std::mem::take(&mut partial.members)));
                *slot = None;
            }
            timer = timer.max(target);
            (component.label.clone(), start, end)
        };

        let erase = rng.gen_bool(1.0 - config.alpha);
        let (start, end) = if erase {
            if rng.gen_bool(0.5) {
                (None, Some(end))
            } else {
                (Some(start), None)
            }
        } else {
            (Some(start), Some(end))
        };
        events.push(GenEvent { label, start, end });

        timer = timer.saturating_add(rng.gen_range(1..=config.max_increment));
    }

    let mut intact = vec![0u64; config.embedded.len()];
    for (pi, members) in &finished {
        if occurrence_intact(&config.embedded[*pi], members, &events) {
            intact[*pi] += 1;
        }
    }

    let instances: Vec<EventInstance> = events
        .into_iter()
        .enumerate()
        .map(|(k, e)| EventInstance {
            id: format!("g{k}"),
            label: e.label,
            start: e.start.map(TimeInstant),
            end: e.end.map(TimeInstant),
            stream_id: "gen".to_string(),
        })
        .collect();
    let stream = EventStream::new("gen", instances).expect("generated ids are unique");
    let report = GenReport {
        per_pattern: config
            .embedded
            .iter()
            .zip(completed.iter().zip(&intact))
            .map(|(p, (&completed, &intact))| EmbedCount {
                pattern: p.display_name(),
                completed,
                intact,
            })
            .collect(),
        noise_events,
        deliberate_events,
    };
    Ok((stream, report))
}

/// Post-erasure check that a completed embedding is still matchable: every
/// component must retain a boundary of the required kind whose time falls
/// in its window, respecting boundary order. Interference from other
/// occurrences is not modelled, so this is a per-occurrence approximation.
fn occurrence_intact(pattern: &Pattern, members: &[usize], events: &[GenEvent]) -> bool {
    let mut prev_matched: Option<(u64, BoundaryKind)> = None;
    let mut prev_anchor: Option<TimeInstant> = None;
    for (k, &ev) in members.iter().enumerate() {
        let e = &events[ev];
        let component = &pattern.components()[k];
        let mut candidates: Vec<(u64, BoundaryKind)> = Vec::with_capacity(2);
        match component.sign {
            ComponentSign::Start => candidates.extend(e.start.map(|t| (t, BoundaryKind::Start))),
            ComponentSign::End => candidates.extend(e.end.map(|t| (t, BoundaryKind::End))),
            ComponentSign::Any => {
                candidates.extend(e.end.map(|t| (t, BoundaryKind::End)));
                candidates.extend(e.start.map(|t| (t, BoundaryKind::Start)));
            }
        }
        // Earliest usable boundary, with the end-before-start tie rule of
        // the serialized order.
        candidates.sort_by_key(|&(t, kind)| (t, kind));
        let matched = candidates.into_iter().find(|&(t, kind)| {
            let ordered = match prev_matched {
                None => true,
                Some((pt, pk)) => {
                    t > pt || (t == pt && pk == BoundaryKind::End && kind == BoundaryKind::Start)
                }
            };
            let in_window = match prev_anchor {
                None => true,
                Some(a) => pattern.windows()[k - 1].contains(a, TimeInstant(t)),
            };
            ordered && in_window
        });
        let Some(matched) = matched else { return false };
        prev_matched = Some(matched);
        prev_anchor = Some(match component.sign {
            ComponentSign::Start => TimeInstant(e.start.expect("matched start")),
            ComponentSign::End => TimeInstant(e.end.expect("matched end")),
            ComponentSign::Any => TimeInstant(e.end.or(e.start).expect("has a timestamp")),
        });
    }
    true
}

/// Recomputes the ground-truth report for a stream produced by `config`.
///
/// The run is regenerated from the seed and compared against `stream` as a
/// multiset of (label, start, end) triples, so renamed instance ids are
/// accepted but any other difference is a mismatch.
pub fn embedding_report(config: &GenConfig, stream: &EventStream) -> Result<GenReport, GenError> {
    let (regenerated, report) = generate_with_report(config)?;
    if regenerated.len() != stream.len() {
        return Err(GenError::ConfigMismatch(format!(
            "expected {} instances, found {}",
            regenerated.len(),
            stream.len()
        )));
    }
    fn key(s: &EventStream) -> Vec<(&str, Option<TimeInstant>, Option<TimeInstant>)> {
        let mut v: Vec<_> = s.events().iter().map(|e| (e.label.as_str(), e.start, e.end)).collect();
        v.sort();
        v
    }
    let expected = key(&regenerated);
    let found = key(stream);
    if let Some(i) = (0..expected.len()).find(|&i| expected[i] != found[i]) {
        return Err(GenError::ConfigMismatch(format!(
            "instance {} of the sorted stream is {:?}, expected {:?}",
            i, found[i], expected[i]
        )));
    }
    Ok(report)
}

/// The comment header written ahead of generated streams. Every parameter
/// that influences the output appears here, so a run can be reproduced
/// from its file alone.
pub fn header_line(config: &GenConfig) -> String {
    let embedded: Vec<String> = config.embedded.iter().map(|p| p.display_name()).collect();
    format!(
        "# gen n={} alphabet={} alpha={} beta={} mu={} sigma={} seed={} \
         max_increment={} rng=chacha8 granularity={} embedded=\"{}\"",
        config.n,
        config.alphabet.join(","),
        config.alpha,
        config.beta,
        config.mu,
        config.sigma,
        config.seed,
        config.max_increment,
        config.granularity,
        embedded.join(";"),
    )
}
