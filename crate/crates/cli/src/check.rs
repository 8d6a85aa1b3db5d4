//! `cooccur check` — pattern-file validation and DOT dumps.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use cooccur_core::automaton::CompiledAutomaton;
use cooccur_core::pattern::parse_pattern_line;

use crate::CliError;

#[derive(Args)]
pub struct CheckArgs {
    /// Pattern file to validate
    pub patterns: PathBuf,
    /// Write one Graphviz DOT file per valid pattern into this directory
    #[arg(long)]
    pub dump_dot: Option<PathBuf>,
}

pub fn run(args: CheckArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.patterns)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.patterns.display())))?;
    if let Some(dir) = &args.dump_dot {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    }

    let mut ok = 0usize;
    let mut invalid = 0usize;
    for (index, line) in text.lines().enumerate() {
        match parse_pattern_line(line, index + 1) {
            Ok(None) => {} // blank or comment line
            Ok(Some(p)) => {
                ok += 1;
                let automaton = CompiledAutomaton::compile(&p);
                println!(
                    "ok: {} (size {}, {} states)",
                    p.display_name(),
                    p.size(),
                    automaton.state_count()
                );
                if let Some(dir) = &args.dump_dot {
                    let name = p.name.clone().unwrap_or_else(|| format!("pattern{ok}"));
                    let path = dir.join(format!("{}.dot", sanitize(&name)));
                    fs::write(&path, automaton.to_dot())
                        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                }
            }
            Err(e) => {
                invalid += 1;
                eprintln!("{}:{e}", args.patterns.display());
            }
        }
    }

    if invalid == 0 {
        println!("{ok} pattern(s) ok");
        Ok(())
    } else {
        Err(CliError::Data(format!("{invalid} invalid pattern line(s)")))
    }
}

/// Declared names may contain arbitrary text; keep file names portable.
fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
