//! `cooccur matrix` — co-occurrence matrices at one or more offsets.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use cooccur_core::cooccurrence::{build_matrix, emit_matrix, MatrixMode, MatrixSpec};
use cooccur_core::pattern::ComponentSign;
use cooccur_core::EventStream;

use crate::manifest::RunManifest;
use crate::{load_streams, serialize_streams, CliError};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// One shared vocabulary; both axes cover the same labels
    Auto,
    /// Rows from the first input file, columns from the second
    Cross,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SignArg {
    /// Match either boundary of an instance
    Any,
    /// Match only start boundaries
    Start,
    /// Match only end boundaries
    End,
}

impl From<SignArg> for ComponentSign {
    fn from(sign: SignArg) -> ComponentSign {
        match sign {
            SignArg::Any => ComponentSign::Any,
            SignArg::Start => ComponentSign::Start,
            SignArg::End => ComponentSign::End,
        }
    }
}

#[derive(Args)]
pub struct MatrixArgs {
    /// Input stream files; cross mode requires exactly two
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Comma-separated temporal offsets; one matrix per value
    #[arg(long, value_delimiter = ',', required = true)]
    pub dt: Vec<u64>,
    /// Label set for both axes (auto mode; default: all labels seen)
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
    /// Row labels (cross mode; default: labels of the first file)
    #[arg(long, value_delimiter = ',')]
    pub labels_x: Vec<String>,
    /// Column labels (cross mode; default: labels of the second file)
    #[arg(long, value_delimiter = ',')]
    pub labels_y: Vec<String>,
    /// Boundary sign required of the row event
    #[arg(long, value_enum, default_value_t = SignArg::Any)]
    pub sign_first: SignArg,
    /// Boundary sign required of the column event
    #[arg(long, value_enum, default_value_t = SignArg::Any)]
    pub sign_second: SignArg,
    /// Output path prefix; files are named <prefix>_dt<offset>.<format>
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated output formats (csv, svg)
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<String>,
}

pub fn run(args: MatrixArgs) -> Result<(), CliError> {
    if args.mode == ModeArg::Cross && args.inputs.len() != 2 {
        return Err(CliError::Usage(format!(
            "cross mode requires exactly two stream files, got {}",
            args.inputs.len()
        )));
    }

    let streams = load_streams(&args.inputs)?;
    let s = serialize_streams(&streams)?;

    let (mode, labels_x, labels_y) = match args.mode {
        ModeArg::Auto => {
            let labels =
                if args.labels.is_empty() { s.labels() } else { args.labels.clone() };
            (MatrixMode::Auto, labels.clone(), labels)
        }
        ModeArg::Cross => {
            let labels_x = if args.labels_x.is_empty() {
                stream_labels(&streams[0])
            } else {
                args.labels_x.clone()
            };
            let labels_y = if args.labels_y.is_empty() {
                stream_labels(&streams[1])
            } else {
                args.labels_y.clone()
            };
            (MatrixMode::Cross, labels_x, labels_y)
        }
    };

    let mut manifest = RunManifest::new("matrix");
    manifest.flag("mode", if args.mode == ModeArg::Auto { "auto" } else { "cross" });
    manifest.flag("dt", args.dt.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    manifest.flag("labels-x", labels_x.join(","));
    manifest.flag("labels-y", labels_y.join(","));
    for path in &args.inputs {
        manifest.input(path)?;
    }

    for &dt in &args.dt {
        let spec = MatrixSpec {
            mode,
            labels_x: labels_x.clone(),
            labels_y: labels_y.clone(),
            dt,
            sign_first: args.sign_first.into(),
            sign_second: args.sign_second.into(),
        };
        let m = build_matrix(&s, &spec);
        for format in &args.format {
            // A format typo is a flag mistake, hence a usage error.
            let body = emit_matrix(&m, format).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut bytes = Vec::new();
            match format.as_str() {
                "svg" => bytes.extend_from_slice(manifest.xml_comment().as_bytes()),
                _ => {
                    for line in manifest.comment_lines() {
                        bytes.extend_from_slice(line.as_bytes());
                        bytes.push(b'\n');
                    }
                }
            }
            bytes.extend_from_slice(&body);
            let path = PathBuf::from(format!("{}_dt{dt}.{format}", args.out.display()));
            std::fs::write(&path, bytes)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn stream_labels(stream: &EventStream) -> Vec<String> {
    let set: BTreeSet<String> = stream.events().iter().map(|e| e.label.clone()).collect();
    set.into_iter().collect()
}
