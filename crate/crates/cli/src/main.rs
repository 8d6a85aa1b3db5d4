//! `cooccur` — temporal co-occurrence analysis over semi-interval event
//! streams: synthetic stream generation, pattern validation, one-pass
//! occurrence counting, and co-occurrence matrices.

mod check;
mod count;
mod gen;
mod manifest;
mod matrix;
mod oracle;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use cooccur_core::stream_io::read_stream_path;
use cooccur_core::{parse_pattern_file, serialize, EventStream, Pattern, SerializedStream};

/// Subcommand failures, split by exit code: usage errors exit 2 (matching
/// clap's own convention), input/data errors exit 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cooccur",
    version,
    about = "Detect and quantify temporal co-occurrence between semi-interval events"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic event stream with optional embedded patterns
    Gen(gen::GenArgs),
    /// Count pattern occurrences over event streams in one pass
    Count(count::CountArgs),
    /// Build co-occurrence matrices at one or more temporal offsets
    Matrix(matrix::MatrixArgs),
    /// Validate a pattern file and optionally dump automata as DOT
    Check(check::CheckArgs),
    /// Compare engine counts against the brute-force reference (debugging)
    #[command(hide = true)]
    Oracle(oracle::OracleArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen::run(args),
        Command::Count(args) => count::run(args),
        Command::Matrix(args) => matrix::run(args),
        Command::Check(args) => check::run(args),
        Command::Oracle(args) => oracle::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Reads every input stream file; format is chosen per file extension.
fn load_streams(paths: &[PathBuf]) -> Result<Vec<EventStream>, CliError> {
    paths
        .iter()
        .map(|p| read_stream_path(p).map_err(|e| CliError::Data(e.to_string())))
        .collect()
}

/// Serializes all input streams into one ordered boundary stream.
fn serialize_streams(streams: &[EventStream]) -> Result<SerializedStream, CliError> {
    serialize(streams).map_err(|e| CliError::Data(e.to_string()))
}

/// Parses a pattern file; diagnostics are prefixed with the file path so
/// they read as `path:line:col: message`.
fn load_patterns(path: &Path) -> Result<Vec<Pattern>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_pattern_file(&text).map_err(|e| CliError::Data(format!("{}:{e}", path.display())))
}

/// Creates an output file, mapping failures to data errors with the path.
fn create_file(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
