//! `cooccur count` — one-pass pattern counting over serialized streams.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use cooccur_core::engine::{
    count_patterns, count_patterns_with_occurrences, count_prefixes, write_occurrences_csv,
};
use cooccur_core::serialize::encode_relational;

use crate::manifest::RunManifest;
use crate::{create_file, load_patterns, load_streams, serialize_streams, CliError};

#[derive(Args)]
pub struct CountArgs {
    /// Input stream files (.jsonl / .csv); all are serialized together
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Pattern file, one pattern per line (`name: pattern` names the rows)
    #[arg(long)]
    pub patterns: PathBuf,
    /// Count every prefix of each pattern: one row per prefix size
    #[arg(long)]
    pub prefixes: bool,
    /// Write the counts table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record matched occurrences and write their boundary rows (CSV) here
    #[arg(long)]
    pub occurrences: Option<PathBuf>,
    /// Write the relational encoding of the serialized input here
    #[arg(long)]
    pub dump_serialized: Option<PathBuf>,
}

pub fn run(args: CountArgs) -> Result<(), CliError> {
    let patterns = load_patterns(&args.patterns)?;
    let streams = load_streams(&args.inputs)?;
    let s = serialize_streams(&streams)?;

    let mut manifest = RunManifest::new("count");
    manifest.flag("patterns", args.patterns.display());
    manifest.switch("prefixes", args.prefixes);
    manifest.input(&args.patterns)?;
    for path in &args.inputs {
        manifest.input(path)?;
    }

    let result = if args.occurrences.is_some() {
        count_patterns_with_occurrences(&s, &patterns)
    } else {
        count_patterns(&s, &patterns)
    };

    let mut rows: Vec<(String, usize, u64)> = Vec::new();
    if args.prefixes {
        for p in &patterns {
            for (k, freq) in count_prefixes(&s, p).iter().enumerate() {
                rows.push((p.display_name(), k + 1, *freq));
            }
        }
    } else {
        for (p, freq) in patterns.iter().zip(&result.frequencies) {
            rows.push((p.display_name(), p.size(), *freq));
        }
    }

    let table = render_table(&rows)?;
    match &args.out {
        Some(path) => {
            let mut w = create_file(path)?;
            let io_err = |e: std::io::Error| CliError::Data(format!("{}: {e}", path.display()));
            for line in manifest.comment_lines() {
                writeln!(w, "{line}").map_err(io_err)?;
            }
            w.write_all(table.as_bytes()).map_err(io_err)?;
        }
        None => print!("{table}"),
    }

    if let Some(path) = &args.occurrences {
        let mut buf = Vec::new();
        for line in manifest.comment_lines() {
            writeln!(buf, "{line}").expect("vec write");
        }
        write_occurrences_csv(&patterns, &result, &mut buf)
            .map_err(|e| CliError::Data(e.to_string()))?;
        std::fs::write(path, buf).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }

    if let Some(path) = &args.dump_serialized {
        let mut text = String::new();
        for line in manifest.comment_lines() {
            text.push_str(&line);
            text.push('\n');
        }
        text.push_str(&encode_relational(&s));
        if !text.ends_with('\n') {
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Renders `pattern,size,frequency` rows; the csv writer quotes pattern
/// names that contain commas (any canonical window does).
fn render_table(rows: &[(String, usize, u64)]) -> Result<String, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Data(e.to_string());
    wtr.write_record(["pattern", "size", "frequency"]).map_err(csv_err)?;
    for (name, size, freq) in rows {
        wtr.write_record([name.as_str(), &size.to_string(), &freq.to_string()])
            .map_err(csv_err)?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
