//! The co-occurrence pattern language.
//!
//! A pattern is a chain of labeled components separated by window arrows:
//!
//! ```text
//! E2 -[20]-> E1-
//! EA+ -[15]-> EB -[10]-> EC- -[20]-> EG -[60]-> EH -[90]-> ED
//! ```
//!
//! A component is a label with an optional sign: `+` matches only start
//! boundaries, `-` only end boundaries, and a bare label matches either. The
//! arrow `-[u]->` is shorthand for the inclusive window `-[0,u]->`. Tokens
//! are whitespace-separated, which keeps the trailing `-` of an end-signed
//! component from colliding with the `-[` of an arrow.

use std::fmt;

use thiserror::Error;

use crate::model::{Boundary, BoundaryKind, EventInstance, TimeInstant, TimeWindow};

/// Boundary polarity a component accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentSign {
    Start,
    End,
    Any,
}

/// One labeled position in a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternComponent {
    pub label: String,
    pub sign: ComponentSign,
}

impl PatternComponent {
    pub fn new(label: impl Into<String>, sign: ComponentSign) -> PatternComponent {
        PatternComponent { label: label.into(), sign }
    }

    /// Label and sign test against a boundary.
    pub fn matches(&self, b: &Boundary) -> bool {
        if self.label != b.label {
            return false;
        }
        match self.sign {
            ComponentSign::Start => b.kind == BoundaryKind::Start,
            ComponentSign::End => b.kind == BoundaryKind::End,
            ComponentSign::Any => true,
        }
    }

    /// Where the next window is measured from once this component matched
    /// boundary `b` of instance `owner`: signed components anchor at the
    /// matched boundary itself, unsigned components at the instance's end
    /// time (or its only timestamp for a semi-interval).
    pub fn anchor_for(&self, b: &Boundary, owner: &EventInstance) -> TimeInstant {
        match self.sign {
            ComponentSign::Start | ComponentSign::End => b.time,
            ComponentSign::Any => owner.anchor_time(),
        }
    }
}

impl fmt::Display for PatternComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            ComponentSign::Start => write!(f, "{}+", self.label),
            ComponentSign::End => write!(f, "{}-", self.label),
            ComponentSign::Any => write!(f, "{}", self.label),
        }
    }
}

/// A parsed pattern: `N` components joined by `N - 1` windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    components: Vec<PatternComponent>,
    windows: Vec<TimeWindow>,
    pub name: Option<String>,
}

impl Pattern {
    pub fn new(
        components: Vec<PatternComponent>,
        windows: Vec<TimeWindow>,
        name: Option<String>,
    ) -> Result<Pattern, PatternError> {
        if components.is_empty() {
            return Err(PatternError::Empty);
        }
        if windows.len() != components.len() - 1 {
            return Err(PatternError::Arity {
                components: components.len(),
                windows: windows.len(),
            });
        }
        Ok(Pattern { components, windows, name })
    }

    pub fn size(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PatternComponent] {
        &self.components
    }

    pub fn windows(&self) -> &[TimeWindow] {
        &self.windows
    }

    pub fn first_label(&self) -> &str {
        &self.components[0].label
    }

    /// The pattern made of the first `k` components (and `k - 1` windows).
    pub fn prefix(&self, k: usize) -> Result<Pattern, PatternError> {
        if k < 1 || k > self.size() {
            return Err(PatternError::OutOfRange { k, n: self.size() });
        }
        Ok(Pattern {
            components: self.components[..k].to_vec(),
            windows: self.windows[..k - 1].to_vec(),
            name: self.name.clone(),
        })
    }

    /// The declared name when present, otherwise the canonical text.
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format_pattern(self))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_pattern(self))
    }
}

/// Canonical text form; windows are always written with both bounds.
pub fn format_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    for (i, c) in p.components().iter().enumerate() {
        if i > 0 {
            let w = &p.windows()[i - 1];
            out.push_str(&format!(" -[{},{}]-> ", w.lower(), w.upper()));
        }
        out.push_str(&c.to_string());
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: window [{lower},{upper}] is invalid: bounds must satisfy 0 <= lower <= upper")]
    Window {
        line: usize,
        col: usize,
        lower: i128,
        upper: i128,
    },
    #[error("prefix size {k} is out of range 1..={n}")]
    OutOfRange { k: usize, n: usize },
    #[error("a pattern needs at least one component")]
    Empty,
    #[error("{components} components require {} windows, got {windows}", components - 1)]
    Arity { components: usize, windows: usize },
}

fn is_label_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// A whitespace-delimited token with its 1-based column.
struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &text[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &text[s..], col: s + 1 });
    }
    out
}

fn parse_component(tok: &Token<'_>, line: usize) -> Result<PatternComponent, PatternError> {
    let (body, sign) = match tok.text.as_bytes().last() {
        Some(b'+') => (&tok.text[..tok.text.len() - 1], ComponentSign::Start),
        Some(b'-') => (&tok.text[..tok.text.len() - 1], ComponentSign::End),
        _ => (tok.text, ComponentSign::Any),
    };
    let mut chars = body.chars();
    let valid = match chars.next() {
        Some(c) if is_label_start(c) => chars.all(is_label_char),
        _ => false,
    };
    if !valid {
        return Err(PatternError::Syntax {
            line,
            col: tok.col,
            msg: format!("expected a component like `EA`, `EA+` or `EA-`, found `{}`", tok.text),
        });
    }
    Ok(PatternComponent::new(body, sign))
}

fn parse_arrow(tok: &Token<'_>, line: usize) -> Result<TimeWindow, PatternError> {
    let syntax = |msg: String| PatternError::Syntax { line, col: tok.col, msg };
    let inner = tok
        .text
        .strip_prefix("-[")
        .and_then(|t| t.strip_suffix("]->"))
        .ok_or_else(|| syntax(format!("expected an arrow like `-[u]->` or `-[l,u]->`, found `{}`", tok.text)))?;
    let mut bounds = Vec::with_capacity(2);
    for part in inner.split(',') {
        let n: i128 = part
            .parse()
            .map_err(|_| syntax(format!("expected an integer window bound, found `{part}`")))?;
        bounds.push(n);
    }
    let (lower, upper) = match bounds.as_slice() {
        [u] => (0, *u),
        [l, u] => (*l, *u),
        _ => return Err(syntax(format!("expected one or two window bounds, found {}", bounds.len()))),
    };
    if lower < 0 || upper < 0 || lower > upper || upper > u64::MAX as i128 {
        return Err(PatternError::Window { line, col: tok.col, lower, upper });
    }
    Ok(TimeWindow::new(lower as u64, upper as u64).expect("bounds validated"))
}

fn parse_tokens(tokens: &[Token<'_>], line: usize, name: Option<String>) -> Result<Pattern, PatternError> {
    if tokens.is_empty() {
        return Err(PatternError::Syntax {
            line,
            col: 1,
            msg: "empty pattern".to_string(),
        });
    }
    let mut components = vec![parse_component(&tokens[0], line)?];
    let mut windows = Vec::new();
    let mut rest = &tokens[1..];
    while !rest.is_empty() {
        if rest.len() < 2 {
            return Err(PatternError::Syntax {
                line,
                col: rest[0].col,
                msg: "dangling arrow: expected `-[l,u]-> component`".to_string(),
            });
        }
        windows.push(parse_arrow(&rest[0], line)?);
        components.push(parse_component(&rest[1], line)?);
        rest = &rest[2..];
    }
    Pattern::new(components, windows, name)
}

/// Parses a single bare pattern (no name prefix, no comments).
pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    parse_tokens(&tokenize(text), 1, None)
}

/// Parses one line of a pattern file. Returns `Ok(None)` for blank lines and
/// comments. A line may carry a `name:` prefix; anything after `#` is
/// ignored.
pub fn parse_pattern_line(line_text: &str, line_no: usize) -> Result<Option<Pattern>, PatternError> {
    let body = match line_text.find('#') {
        Some(i) => &line_text[..i],
        None => line_text,
    };
    if body.trim().is_empty() {
        return Ok(None);
    }
    let (name, rest, offset) = match body.find(':') {
        Some(i) => {
            let raw_name = body[..i].trim();
            let mut chars = raw_name.chars();
            let valid = match chars.next() {
                Some(c) if is_label_start(c) => chars.all(is_label_char),
                _ => false,
            };
            if !valid {
                return Err(PatternError::Syntax {
                    line: line_no,
                    col: 1,
                    msg: format!("invalid pattern name `{raw_name}`"),
                });
            }
            (Some(raw_name.to_string()), &body[i + 1..], i + 1)
        }
        None => (None, body, 0),
    };
    let mut tokens = tokenize(rest);
    for t in &mut tokens {
        t.col += offset;
    }
    parse_tokens(&tokens, line_no, name).map(Some)
}

/// Parses a whole pattern file: one pattern per line, `#` comments, optional
/// `name:` prefixes. Fails on the first malformed line.
pub fn parse_pattern_file(text: &str) -> Result<Vec<Pattern>, PatternError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(p) = parse_pattern_line(line, i + 1)? {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_shorthand_window_and_signs() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        assert_eq!(p.size(), 2);
        assert_eq!(p.components()[0], PatternComponent::new("E2", ComponentSign::Any));
        assert_eq!(p.components()[1], PatternComponent::new("E1", ComponentSign::End));
        assert_eq!((p.windows()[0].lower(), p.windows()[0].upper()), (0, 20));
    }

    #[test]
    fn parses_six_component_chain() {
        let p = parse_pattern("EA+ -[15]-> EB -[10]-> EC- -[20]-> EG -[60]-> EH -[90]-> ED").unwrap();
        assert_eq!(p.size(), 6);
        assert_eq!(p.components()[0].sign, ComponentSign::Start);
        assert_eq!(p.components()[2].sign, ComponentSign::End);
        assert_eq!(p.windows()[4].upper(), 90);
    }

    #[test]
    fn parses_explicit_window() {
        let p = parse_pattern("A -[3,9]-> B+").unwrap();
        assert_eq!((p.windows()[0].lower(), p.windows()[0].upper()), (3, 9));
    }

    #[test]
    fn rejects_inverted_and_negative_windows() {
        assert!(matches!(
            parse_pattern("A -[5,3]-> B"),
            Err(PatternError::Window { lower: 5, upper: 3, .. })
        ));
        assert!(matches!(
            parse_pattern("A -[-2]-> B"),
            Err(PatternError::Window { upper: -2, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_pattern("E2 -<20>-> E1-") {
            Err(PatternError::Syntax { line, col, .. }) => {
                assert_eq!((line, col), (1, 4));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_pattern(""), Err(PatternError::Syntax { .. })));
        assert!(matches!(parse_pattern("A -[5]->"), Err(PatternError::Syntax { .. })));
        assert!(matches!(parse_pattern("A B"), Err(PatternError::Syntax { .. })));
        assert!(matches!(parse_pattern("9A"), Err(PatternError::Syntax { .. })));
    }

    #[test]
    fn formats_canonically() {
        let p = parse_pattern("E2 -[20]-> E1-").unwrap();
        assert_eq!(format_pattern(&p), "E2 -[0,20]-> E1-");
        let q = parse_pattern("EA+").unwrap();
        assert_eq!(format_pattern(&q), "EA+");
        let r = parse_pattern("A -[3,9]-> B").unwrap();
        assert_eq!(format_pattern(&r), "A -[3,9]-> B");
    }

    #[test]
    fn parse_of_format_is_identity() {
        for text in ["E2 -[0,20]-> E1-", "EA+", "A -[3,9]-> B -[0,0]-> A-"] {
            let p = parse_pattern(text).unwrap();
            assert_eq!(parse_pattern(&format_pattern(&p)).unwrap(), p);
            assert_eq!(format_pattern(&p), text);
        }
    }

    #[test]
    fn prefixes_truncate_components_and_windows() {
        let p = parse_pattern("A -[1]-> B -[2]-> C").unwrap();
        let p1 = p.prefix(1).unwrap();
        assert_eq!(format_pattern(&p1), "A");
        let p2 = p.prefix(2).unwrap();
        assert_eq!(format_pattern(&p2), "A -[0,1]-> B");
        assert_eq!(p.prefix(3).unwrap(), p);
        assert_eq!(p.prefix(0).unwrap_err(), PatternError::OutOfRange { k: 0, n: 3 });
        assert_eq!(p.prefix(4).unwrap_err(), PatternError::OutOfRange { k: 4, n: 3 });
    }

    #[test]
    fn pattern_file_supports_names_comments_and_blanks() {
        let text = "# header comment\n\nrho1: E2 -[20]-> E1-\nEA+ -[5]-> EB # trailing note\n";
        let ps = parse_pattern_file(text).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].name.as_deref(), Some("rho1"));
        assert_eq!(ps[0].display_name(), "rho1");
        assert_eq!(ps[1].name, None);
        assert_eq!(ps[1].display_name(), "EA+ -[0,5]-> EB");
    }

    #[test]
    fn pattern_file_errors_carry_line_numbers() {
        let text = "ok: A -[5]-> B\nbad line here\n";
        match parse_pattern_file(text) {
            Err(PatternError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_pattern_line("9bad: A", 3),
            Err(PatternError::Syntax { line: 3, .. })
        ));
    }
}
