//! Co-occurrence scores between event types and their Δt-indexed matrices.
//!
//! The score of an ordered label pair (a, b) at offset Δt is the greedy
//! occurrence count of the two-component pattern `a -[0,Δt]-> b`, normalized
//! by the number of `a` instances in the stream. A zero denominator yields
//! NA, which is distinct from a score of zero: NA means the source label
//! never occurs at all.

use std::fmt;

use thiserror::Error;

use crate::engine::count_patterns;
use crate::model::{EventStream, TimeWindow};
use crate::pattern::{ComponentSign, Pattern, PatternComponent};
use crate::serialize::{serialize, SerializeError, SerializedStream};

/// Whether both matrix axes come from one vocabulary or from two streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixMode {
    Auto,
    Cross,
}

impl fmt::Display for MatrixMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixMode::Auto => "auto",
            MatrixMode::Cross => "cross",
        })
    }
}

/// Requested shape of a co-occurrence matrix.
#[derive(Debug, Clone)]
pub struct MatrixSpec {
    pub mode: MatrixMode,
    /// Row labels (the normalized, leading component of each pair).
    pub labels_x: Vec<String>,
    /// Column labels (the trailing component).
    pub labels_y: Vec<String>,
    pub dt: u64,
    pub sign_first: ComponentSign,
    pub sign_second: ComponentSign,
}

impl MatrixSpec {
    /// Square matrix over one vocabulary, unsigned components.
    pub fn auto(labels: Vec<String>, dt: u64) -> MatrixSpec {
        MatrixSpec {
            mode: MatrixMode::Auto,
            labels_y: labels.clone(),
            labels_x: labels,
            dt,
            sign_first: ComponentSign::Any,
            sign_second: ComponentSign::Any,
        }
    }

    /// Rectangular matrix with distinct row and column vocabularies.
    pub fn cross(labels_x: Vec<String>, labels_y: Vec<String>, dt: u64) -> MatrixSpec {
        MatrixSpec {
            mode: MatrixMode::Cross,
            labels_x,
            labels_y,
            dt,
            sign_first: ComponentSign::Any,
            sign_second: ComponentSign::Any,
        }
    }
}

/// A filled co-occurrence matrix; `None` cells are NA.
#[derive(Debug, Clone, PartialEq)]
pub struct CoMatrix {
    pub mode: MatrixMode,
    pub labels_x: Vec<String>,
    pub labels_y: Vec<String>,
    pub dt: u64,
    cells: Vec<Option<f64>>,
}

impl CoMatrix {
    pub fn rows(&self) -> usize {
        self.labels_x.len()
    }

    pub fn cols(&self) -> usize {
        self.labels_y.len()
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<f64> {
        self.cells[i * self.cols() + j]
    }

    /// Row-major cell values.
    pub fn cells(&self) -> &[Option<f64>] {
        &self.cells
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoocError {
    #[error("unsupported matrix format `{0}` (expected `csv` or `svg`)")]
    UnsupportedFormat(String),
}

/// The two-component pattern whose count is the numerator of a score.
pub fn pair_pattern(
    first: &str,
    sign_first: ComponentSign,
    second: &str,
    sign_second: ComponentSign,
    dt: u64,
) -> Pattern {
    Pattern::new(
        vec![
            PatternComponent { label: first.to_string(), sign: sign_first },
            PatternComponent { label: second.to_string(), sign: sign_second },
        ],
        vec![TimeWindow::new(0, dt).expect("0 <= dt")],
        None,
    )
    .expect("two components, one window")
}

fn score(count: u64, denominator: u64) -> Option<f64> {
    (denominator > 0).then(|| count as f64 / denominator as f64)
}

/// Score of the ordered pair (ei, ej) within one serialized stream.
pub fn auto_cooccurrence(s: &SerializedStream, ei: &str, ej: &str, dt: u64) -> Option<f64> {
    let p = pair_pattern(ei, ComponentSign::Any, ej, ComponentSign::Any, dt);
    let count = count_patterns(s, std::slice::from_ref(&p)).frequencies[0];
    score(count, s.count_instances(ei))
}

/// Score of (ei, ej) across two streams, serialized together.
pub fn cross_cooccurrence(
    sa: &EventStream,
    sb: &EventStream,
    ei: &str,
    ej: &str,
    dt: u64,
) -> Result<Option<f64>, SerializeError> {
    let s = serialize(&[sa.clone(), sb.clone()])?;
    Ok(auto_cooccurrence(&s, ei, ej, dt))
}

/// Fills the whole matrix with a single engine pass over the stream.
pub fn build_matrix(s: &SerializedStream, spec: &MatrixSpec) -> CoMatrix {
    let patterns: Vec<Pattern> = spec
        .labels_x
        .iter()
        .flat_map(|x| {
            spec.labels_y
                .iter()
                .map(|y| pair_pattern(x, spec.sign_first, y, spec.sign_second, spec.dt))
        })
        .collect();
    let counts = count_patterns(s, &patterns).frequencies;
    let cols = spec.labels_y.len();
    let mut cells = Vec::with_capacity(counts.len());
    for (i, x) in spec.labels_x.iter().enumerate() {
        let denominator = s.count_instances(x);
        for j in 0..cols {
            cells.push(score(counts[i * cols + j], denominator));
        }
    }
    CoMatrix {
        mode: spec.mode,
        labels_x: spec.labels_x.clone(),
        labels_y: spec.labels_y.clone(),
        dt: spec.dt,
        cells,
    }
}

/// CSV rendering: `lbl` plus the column labels as header, one row per
/// source label, six-decimal values, NA as an empty cell.
pub fn matrix_csv(m: &CoMatrix) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = Vec::with_capacity(1 + m.cols());
    header.push("lbl".to_string());
    header.extend(m.labels_y.iter().cloned());
    wtr.write_record(&header).expect("in-memory write");
    for (i, x) in m.labels_x.iter().enumerate() {
        let mut row = Vec::with_capacity(1 + m.cols());
        row.push(x.clone());
        for j in 0..m.cols() {
            row.push(match m.cell(i, j) {
                Some(v) => format!("{v:.6}"),
                None => String::new(),
            });
        }
        wtr.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf8")
}

const CELL: usize = 24;

fn shade(v: f64, min: f64, max: f64) -> u8 {
    // Lightest at the smallest defined value, darkest at the largest; a
    // flat matrix sits in the middle.
    let t = if max > min { (v - min) / (max - min) } else { 0.5 };
    (245.0 - t * 225.0).round() as u8
}

/// Deterministic SVG heatmap: grayscale over the defined cells' value
/// range, hatched cells for NA, axis labels on the top and left edges.
pub fn matrix_svg(m: &CoMatrix) -> String {
    let defined: Vec<f64> = m.cells().iter().flatten().copied().collect();
    let min = defined.iter().copied().fold(f64::INFINITY, f64::min);
    let max = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let label_chars = m.labels_x.iter().map(|l| l.chars().count()).max().unwrap_or(1);
    let left = 16 + 7 * label_chars;
    let top = 48;
    let width = left + CELL * m.cols() + 12;
    let height = top + CELL * m.rows() + 12;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"10\">\n"
    ));
    svg.push_str(
        "  <defs>\n    <pattern id=\"na\" width=\"6\" height=\"6\" \
         patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\n      \
         <rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>\n      \
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#bbbbbb\" stroke-width=\"2\"/>\n    \
         </pattern>\n  </defs>\n",
    );
    svg.push_str(&format!(
        "  <text x=\"{left}\" y=\"16\" font-size=\"12\">co-occurrence ({}), dt = {}</text>\n",
        m.mode, m.dt
    ));
    for (j, y) in m.labels_y.iter().enumerate() {
        let cx = left + j * CELL + CELL / 2;
        svg.push_str(&format!(
            "  <text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            top - 8,
            escape_xml(y)
        ));
    }
    for (i, x) in m.labels_x.iter().enumerate() {
        let cy = top + i * CELL + CELL / 2 + 4;
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{cy}\" text-anchor=\"end\">{}</text>\n",
            left - 6,
            escape_xml(x)
        ));
    }
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let (fill, tip) = match m.cell(i, j) {
                Some(v) => {
                    let c = shade(v, min, max);
                    (format!("rgb({c},{c},{c})"), format!("{v:.6}"))
                }
                None => ("url(#na)".to_string(), "NA".to_string()),
            };
            svg.push_str(&format!(
                "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" \
                 fill=\"{fill}\" stroke=\"#999999\"><title>{} ; {} = {tip}</title></rect>\n",
                left + j * CELL,
                top + i * CELL,
                escape_xml(&m.labels_x[i]),
                escape_xml(&m.labels_y[j]),
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a matrix in the named format.
pub fn emit_matrix(m: &CoMatrix, format: &str) -> Result<Vec<u8>, CoocError> {
    match format {
        "csv" => Ok(matrix_csv(m).into_bytes()),
        "svg" => Ok(matrix_svg(m).into_bytes()),
        other => Err(CoocError::UnsupportedFormat(other.to_string())),
    }
}
