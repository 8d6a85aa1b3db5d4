//! `cooccur oracle` — hidden debugging subcommand comparing the engine
//! against the brute-force reference on small inputs.

use std::path::PathBuf;

use clap::Args;

use cooccur_core::engine::count_patterns;
use cooccur_core::oracle::{evaluate, OracleCaps};

use crate::{load_patterns, load_streams, serialize_streams, CliError};

#[derive(Args)]
pub struct OracleArgs {
    /// Input stream files
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Pattern file, one pattern per line
    #[arg(long)]
    pub patterns: PathBuf,
    /// Refuse streams with more serialized boundaries than this
    #[arg(long)]
    pub max_boundaries: Option<usize>,
    /// Refuse patterns whose labels have more instances than this
    #[arg(long)]
    pub max_instances: Option<usize>,
}

pub fn run(args: OracleArgs) -> Result<(), CliError> {
    let patterns = load_patterns(&args.patterns)?;
    let streams = load_streams(&args.inputs)?;
    let s = serialize_streams(&streams)?;

    let mut caps = OracleCaps::default();
    if let Some(v) = args.max_boundaries {
        caps.max_boundaries = v;
    }
    if let Some(v) = args.max_instances {
        caps.max_instances_per_label = v;
    }

    let engine = count_patterns(&s, &patterns);
    let mut wtr = csv::Writer::from_writer(std::io::stdout());
    let csv_err = |e: csv::Error| CliError::Data(e.to_string());
    wtr.write_record(["pattern", "engine", "oracle", "exhaustive"]).map_err(csv_err)?;
    for (p, freq) in patterns.iter().zip(&engine.frequencies) {
        let reference = evaluate(&s, p, &caps).map_err(|e| CliError::Data(e.to_string()))?;
        wtr.write_record([
            p.display_name().as_str(),
            &freq.to_string(),
            &reference.greedy_count.to_string(),
            &reference.all_bindings.len().to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(())
}
