//! Timed finite-state automata compiled from patterns.
//!
//! A pattern of size `N` compiles to `2N` states: `N` ordinary states that
//! each wait for one component's boundary, `N - 1` time states that install
//! the window to the next component, and one final (accepting) state. The
//! hop through a time state consumes no input; matching a component's
//! boundary and arming the next window happen in a single step.
//!
//! A run walks the chain over a serialized boundary sequence. Three rules
//! shape every transition:
//!
//! * anchoring - a signed component anchors the next window at the matched
//!   boundary's time; an unsigned component anchors at the owning instance's
//!   end time (its only timestamp for a semi-interval), even when the start
//!   boundary was the one consumed;
//! * expiry - once a boundary arrives later than `anchor + upper`, whatever
//!   its label, the partial match is dead and the run resets so the very
//!   same boundary may begin a new attempt;
//! * freshness - an instance never appears twice in one occurrence, and an
//!   instance consumed by a completed occurrence is never bound again.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::model::{Boundary, EventInstance, TimeInstant, TimeWindow};
use crate::pattern::{Pattern, PatternComponent};

/// The guard on an ordinary state's outgoing edge: a component test plus,
/// from the second component on, a window check against the current anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeFormula {
    pub component: PatternComponent,
    pub window: Option<TimeWindow>,
}

impl std::fmt::Display for EdgeFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.window {
            None => write!(f, "{}", self.component),
            Some(w) => write!(f, "{} in a+{}", self.component, w),
        }
    }
}

/// An ordinary state: position `index` has matched `index` components and
/// awaits the next one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinaryState {
    pub index: usize,
    pub awaits: PatternComponent,
    pub formula: EdgeFormula,
}

/// A pattern compiled into its state chain.
#[derive(Debug, Clone)]
pub struct CompiledAutomaton {
    pattern: Pattern,
    ordinary_states: Vec<OrdinaryState>,
    time_states: Vec<TimeWindow>,
}

impl CompiledAutomaton {
    pub fn compile(pattern: &Pattern) -> CompiledAutomaton {
        let ordinary_states = pattern
            .components()
            .iter()
            .enumerate()
            .map(|(i, c)| OrdinaryState {
                index: i,
                awaits: c.clone(),
                formula: EdgeFormula {
                    component: c.clone(),
                    window: if i == 0 { None } else { Some(pattern.windows()[i - 1]) },
                },
            })
            .collect();
        CompiledAutomaton {
            time_states: pattern.windows().to_vec(),
            pattern: pattern.clone(),
            ordinary_states,
        }
    }

    /// Pattern size `N`.
    pub fn size(&self) -> usize {
        self.pattern.size()
    }

    /// Total number of states: `N` ordinary + `N - 1` time + 1 final = `2N`.
    pub fn state_count(&self) -> usize {
        self.ordinary_states.len() + self.time_states.len() + 1
    }

    pub fn ordinary_states(&self) -> &[OrdinaryState] {
        &self.ordinary_states
    }

    pub fn time_states(&self) -> &[TimeWindow] {
        &self.time_states
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Graphviz rendering: ordinary states as solid circles, time states as
    /// dashed circles, the final state as a double circle.
    pub fn to_dot(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        let _ = writeln!(out, "digraph fsa_t {{");
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  labelloc=t;");
        let _ = writeln!(out, "  label=\"{}\";", escape_dot(&self.pattern.display_name()));
        for st in &self.ordinary_states {
            let _ = writeln!(
                out,
                "  os{} [shape=circle, label=\"({}, {})\"];",
                st.index,
                st.index,
                escape_dot(&st.awaits.to_string())
            );
        }
        for (i, w) in self.time_states.iter().enumerate() {
            let _ = writeln!(out, "  ts{} [shape=circle, style=dashed, label=\"{w}\"];", i + 1);
        }
        let _ = writeln!(out, "  fin [shape=doublecircle, label=\"({n}, phi)\"];");
        for (i, st) in self.ordinary_states.iter().enumerate() {
            let theta = escape_dot(&st.formula.to_string());
            if i + 1 < n {
                let _ = writeln!(out, "  os{i} -> ts{} [label=\"{theta}\"];", i + 1);
                let _ = writeln!(
                    out,
                    "  ts{} -> os{} [style=dashed, label=\"eps: install {}\"];",
                    i + 1,
                    i + 1,
                    self.time_states[i]
                );
            } else {
                let _ = writeln!(out, "  os{i} -> fin [label=\"{theta}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Result of evaluating one edge formula against one boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaEval {
    Match,
    NoMatch,
    Expired,
}

/// Result of feeding one boundary to a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// The boundary matched and the run advanced to the next component.
    Advance,
    /// The boundary is irrelevant to the run in its current state.
    Skip,
    /// The pending window lapsed. The run has been reset; the caller should
    /// offer the same boundary again, since it may begin a new attempt.
    Expired,
    /// The final component matched; a complete occurrence was recognized.
    Accept,
}

/// The single live run of a compiled pattern.
#[derive(Debug, Clone)]
pub struct AutomatonRun {
    /// 1-based index of the next awaited component.
    position: usize,
    anchor: Option<TimeInstant>,
    deadline: Option<TimeInstant>,
    /// Instances bound by the current partial match.
    bound: HashSet<String>,
    /// Instances consumed by completed occurrences; never released.
    committed: HashSet<String>,
    /// `(component position, boundary)` pairs of the current partial match.
    matched: Vec<(usize, Boundary)>,
}

impl Default for AutomatonRun {
    fn default() -> Self {
        Self::new()
    }
}

impl AutomatonRun {
    pub fn new() -> AutomatonRun {
        AutomatonRun {
            position: 1,
            anchor: None,
            deadline: None,
            bound: HashSet::new(),
            committed: HashSet::new(),
            matched: Vec::new(),
        }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn anchor(&self) -> Option<TimeInstant> {
        self.anchor
    }

    pub fn deadline(&self) -> Option<TimeInstant> {
        self.deadline
    }

    /// A run is live once it holds a partial match and a pending window.
    pub fn is_live(&self) -> bool {
        self.position > 1
    }

    pub fn matched(&self) -> &[(usize, Boundary)] {
        &self.matched
    }

    /// Freshness: whether `id` is bound by the current partial match or was
    /// consumed by an already-counted occurrence.
    pub fn is_bound(&self, id: &str) -> bool {
        self.bound.contains(id) || self.committed.contains(id)
    }

    /// Evaluates one edge formula. Expiry is checked first and does not
    /// depend on the label; a boundary strictly before the window opens is a
    /// plain no-match (possible when the anchor sits at an instance end that
    /// the stream has not reached yet).
    pub fn eval_formula(
        &self,
        b: &Boundary,
        component: &PatternComponent,
        window: Option<&TimeWindow>,
    ) -> FormulaEval {
        if let (Some(anchor), Some(w)) = (self.anchor, window) {
            if b.time > w.deadline(anchor) {
                return FormulaEval::Expired;
            }
            if !component.matches(b) || self.is_bound(&b.instance_id) {
                return FormulaEval::NoMatch;
            }
            if !w.contains(anchor, b.time) {
                return FormulaEval::NoMatch;
            }
            FormulaEval::Match
        } else {
            if !component.matches(b) || self.is_bound(&b.instance_id) {
                return FormulaEval::NoMatch;
            }
            FormulaEval::Match
        }
    }

    /// Feeds one boundary to the run. `owner` must be the instance the
    /// boundary belongs to; it supplies the end time for unsigned anchoring.
    pub fn step(
        &mut self,
        fsa: &CompiledAutomaton,
        b: &Boundary,
        owner: &EventInstance,
    ) -> StepOutcome {
        debug_assert_eq!(owner.id, b.instance_id);
        debug_assert!(self.position >= 1 && self.position <= fsa.size());
        debug_assert_eq!(self.matched.len(), self.position - 1);
        debug_assert_eq!(self.position == 1, self.anchor.is_none());

        let idx = self.position - 1;
        let component = &fsa.pattern().components()[idx];
        let window = if idx == 0 { None } else { Some(&fsa.time_states()[idx - 1]) };

        match self.eval_formula(b, component, window) {
            FormulaEval::Expired => {
                self.reset_partial();
                StepOutcome::Expired
            }
            FormulaEval::NoMatch => StepOutcome::Skip,
            FormulaEval::Match => {
                self.bound.insert(b.instance_id.clone());
                self.matched.push((self.position, b.clone()));
                let anchor = component.anchor_for(b, owner);
                self.position += 1;
                if self.position > fsa.size() {
                    self.anchor = None;
                    self.deadline = None;
                    StepOutcome::Accept
                } else {
                    // Hop through the time state: arm the next window now.
                    let w = &fsa.time_states()[idx];
                    self.anchor = Some(anchor);
                    self.deadline = Some(w.deadline(anchor));
                    StepOutcome::Advance
                }
            }
        }
    }

    /// Books the accepted occurrence's instances as consumed and returns the
    /// run to its initial state.
    pub fn reset_after_accept(&mut self) {
        self.committed.extend(self.bound.drain());
        self.position = 1;
        self.anchor = None;
        self.deadline = None;
        self.matched.clear();
    }

    /// Drops the current partial match (bindings included) without touching
    /// the instances consumed by completed occurrences.
    fn reset_partial(&mut self) {
        self.bound.clear();
        self.position = 1;
        self.anchor = None;
        self.deadline = None;
        self.matched.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundaryKind;
    use crate::pattern::{parse_pattern, ComponentSign};
    use crate::serialize::serialize;
    use crate::testutil::{inst, stream_s};

    fn boundary(label: &str, kind: BoundaryKind, time: u64, id: &str) -> Boundary {
        Boundary {
            label: label.to_string(),
            kind,
            time: TimeInstant(time),
            instance_id: id.to_string(),
            stream_id: "s".to_string(),
        }
    }

    #[test]
    fn compiles_to_2n_states() {
        for (text, n) in [
            ("EA+", 1),
            ("E2 -[20]-> E1-", 2),
            ("A -[1]-> B -[2]-> C", 3),
        ] {
            let fsa = CompiledAutomaton::compile(&parse_pattern(text).unwrap());
            assert_eq!(fsa.size(), n);
            assert_eq!(fsa.ordinary_states().len(), n);
            assert_eq!(fsa.time_states().len(), n - 1);
            assert_eq!(fsa.state_count(), 2 * n);
        }
    }

    #[test]
    fn first_ordinary_state_has_no_window_guard() {
        let fsa = CompiledAutomaton::compile(&parse_pattern("A -[4]-> B").unwrap());
        assert_eq!(fsa.ordinary_states()[0].formula.window, None);
        assert_eq!(
            fsa.ordinary_states()[1].formula.window,
            Some(TimeWindow::new(0, 4).unwrap())
        );
    }

    #[test]
    fn eval_matches_inside_window() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let e2 = inst("e02", "E2", Some(8), Some(11));
        run.step(&fsa, &boundary("E2", BoundaryKind::Start, 8, "e02"), &e2);
        let eval = run.eval_formula(
            &boundary("E1", BoundaryKind::End, 30, "e05"),
            &p.components()[1],
            Some(&p.windows()[0]),
        );
        assert_eq!(eval, FormulaEval::Match);
    }

    #[test]
    fn eval_expires_past_deadline_regardless_of_label() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        let fsa = CompiledAutomaton::compile(&p);

        // Anchoring at the start time instead of the end would put the same
        // boundary past the deadline (8 + 20 < 30).
        let mut early = AutomatonRun::new();
        let e2_instant = inst("x", "E2", Some(8), Some(8));
        early.step(&fsa, &boundary("E2", BoundaryKind::Start, 8, "x"), &e2_instant);
        assert_eq!(early.deadline(), Some(TimeInstant(28)));
        let eval = early.eval_formula(
            &boundary("E1", BoundaryKind::End, 30, "e05"),
            &p.components()[1],
            Some(&p.windows()[0]),
        );
        assert_eq!(eval, FormulaEval::Expired);

        // A boundary whose label is not even awaited still expires the run.
        let mut run = AutomatonRun::new();
        let e2 = inst("e02", "E2", Some(8), Some(11));
        run.step(&fsa, &boundary("E2", BoundaryKind::Start, 8, "e02"), &e2);
        let eval = run.eval_formula(
            &boundary("E5", BoundaryKind::Start, 35, "e06"),
            &p.components()[1],
            Some(&p.windows()[0]),
        );
        assert_eq!(eval, FormulaEval::Expired);
    }

    #[test]
    fn eval_rejects_boundary_before_window_opens() {
        let p = parse_pattern("A -[5,9]-> B").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let a = inst("a1", "A", Some(10), Some(10));
        run.step(&fsa, &boundary("A", BoundaryKind::Start, 10, "a1"), &a);
        // 12 < anchor 10 + lower 5: too early, but not fatal.
        let eval = run.eval_formula(
            &boundary("B", BoundaryKind::Start, 12, "b1"),
            &p.components()[1],
            Some(&p.windows()[0]),
        );
        assert_eq!(eval, FormulaEval::NoMatch);
    }

    #[test]
    fn unsigned_component_anchors_at_instance_end() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let e2 = inst("e02", "E2", Some(8), Some(11));
        let out = run.step(&fsa, &boundary("E2", BoundaryKind::Start, 8, "e02"), &e2);
        assert_eq!(out, StepOutcome::Advance);
        assert_eq!(run.anchor(), Some(TimeInstant(11)));
        assert_eq!(run.deadline(), Some(TimeInstant(31)));
    }

    #[test]
    fn signed_component_anchors_at_boundary_time() {
        let p = parse_pattern("E2+ -[20]-> E1-").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let e2 = inst("e02", "E2", Some(8), Some(11));
        run.step(&fsa, &boundary("E2", BoundaryKind::Start, 8, "e02"), &e2);
        assert_eq!(run.anchor(), Some(TimeInstant(8)));
    }

    #[test]
    fn full_run_accepts_on_example_stream() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let s = serialize(&[stream_s()]).unwrap();
        let mut run = AutomatonRun::new();
        let mut accepted = 0;
        for b in s.boundaries() {
            let owner = s.instance(&b.instance_id).unwrap();
            match run.step(&fsa, b, owner) {
                StepOutcome::Accept => {
                    accepted += 1;
                    run.reset_after_accept();
                }
                StepOutcome::Expired => {
                    // Offer the boundary to the freshly reset run.
                    if run.step(&fsa, b, owner) == StepOutcome::Accept {
                        accepted += 1;
                        run.reset_after_accept();
                    }
                }
                _ => {}
            }
        }
        assert_eq!(accepted, 2);
    }

    #[test]
    fn fresh_run_skips_unrelated_boundary() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let e5 = inst("e06", "E5", Some(35), Some(40));
        let out = run.step(&fsa, &boundary("E5", BoundaryKind::Start, 35, "e06"), &e5);
        assert_eq!(out, StepOutcome::Skip);
        assert_eq!(run.position(), 1);
    }

    #[test]
    fn run_never_binds_one_instance_twice() {
        // Self-join: the same instance may not serve both components.
        let p = parse_pattern("A -[0,100]-> A").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let a1 = inst("a1", "A", Some(1), Some(3));
        assert_eq!(
            run.step(&fsa, &boundary("A", BoundaryKind::Start, 1, "a1"), &a1),
            StepOutcome::Advance
        );
        assert_eq!(
            run.step(&fsa, &boundary("A", BoundaryKind::End, 3, "a1"), &a1),
            StepOutcome::Skip
        );
        let a2 = inst("a2", "A", Some(5), Some(6));
        assert_eq!(
            run.step(&fsa, &boundary("A", BoundaryKind::Start, 5, "a2"), &a2),
            StepOutcome::Accept
        );
    }

    #[test]
    fn committed_instances_stay_consumed_across_occurrences() {
        // A single-component unsigned pattern counts instances, not
        // boundaries: the end boundary of an already-counted instance must
        // not start a second occurrence.
        let p = parse_pattern("E2").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let e2 = inst("e02", "E2", Some(8), Some(11));
        assert_eq!(
            run.step(&fsa, &boundary("E2", BoundaryKind::Start, 8, "e02"), &e2),
            StepOutcome::Accept
        );
        run.reset_after_accept();
        assert_eq!(
            run.step(&fsa, &boundary("E2", BoundaryKind::End, 11, "e02"), &e2),
            StepOutcome::Skip
        );
    }

    #[test]
    fn expiry_releases_partial_bindings_only() {
        let p = parse_pattern("A -[2]-> B").unwrap();
        let fsa = CompiledAutomaton::compile(&p);
        let mut run = AutomatonRun::new();
        let a1 = inst("a1", "A", Some(1), Some(1));
        run.step(&fsa, &boundary("A", BoundaryKind::Start, 1, "a1"), &a1);
        assert!(run.is_live());
        let c = inst("c1", "C", Some(9), Some(9));
        let out = run.step(&fsa, &boundary("C", BoundaryKind::Start, 9, "c1"), &c);
        assert_eq!(out, StepOutcome::Expired);
        assert_eq!(run.position(), 1);
        assert!(!run.is_bound("a1"));
        assert_eq!(run.matched().len(), 0);
    }

    #[test]
    fn dot_rendering_styles_the_three_state_kinds() {
        let fsa = CompiledAutomaton::compile(&parse_pattern("E2 -[20]-> E1-").unwrap());
        let dot = fsa.to_dot();
        assert!(dot.contains("os0 [shape=circle"));
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("shape=doublecircle"));
        assert!(dot.contains("[0,20]"));
        assert!(dot.starts_with("digraph"));
    }

    #[test]
    fn component_sign_matching() {
        let start = boundary("A", BoundaryKind::Start, 1, "x");
        let end = boundary("A", BoundaryKind::End, 2, "x");
        let any = PatternComponent::new("A", ComponentSign::Any);
        let plus = PatternComponent::new("A", ComponentSign::Start);
        let minus = PatternComponent::new("A", ComponentSign::End);
        assert!(any.matches(&start) && any.matches(&end));
        assert!(plus.matches(&start) && !plus.matches(&end));
        assert!(!minus.matches(&start) && minus.matches(&end));
        assert!(!any.matches(&boundary("B", BoundaryKind::Start, 1, "y")));
    }
}
