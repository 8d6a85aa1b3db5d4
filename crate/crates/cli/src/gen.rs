//! `cooccur gen` — synthetic event-stream generation.

use std::collections::HashSet;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;

use cooccur_core::datagen::{default_alphabet, generate_with_report, header_line, GenConfig, GenReport};
use cooccur_core::stream_io::write_jsonl;
use cooccur_core::{EventInstance, EventStream};

use crate::manifest::RunManifest;
use crate::{create_file, load_patterns, CliError};

#[derive(Args)]
pub struct GenArgs {
    /// Number of event instances to generate
    #[arg(long)]
    pub n: usize,
    /// Alphabet size; labels are spreadsheet-style EA, EB, .., EZ, EAA, ..
    #[arg(long, default_value_t = 22, conflicts_with = "alphabet")]
    pub alphabet_size: usize,
    /// Explicit comma-separated alphabet (replaces --alphabet-size)
    #[arg(long, value_delimiter = ',')]
    pub alphabet: Vec<String>,
    /// Probability that an instance keeps both of its boundaries
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Probability that the next event is uniform noise rather than a step
    /// of an embedded pattern
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Mean event duration
    #[arg(long, default_value_t = 10.0)]
    pub mu: f64,
    /// Standard deviation of event durations
    #[arg(long, default_value_t = 2.5)]
    pub sigma: f64,
    /// Upper bound of the uniform random timer increment between events
    #[arg(long, default_value_t = 5)]
    pub max_increment: u64,
    /// Temporal granularity label recorded in the stream header
    #[arg(long, default_value = "1min")]
    pub granularity: String,
    /// RNG seed; identical flags and seed reproduce files byte for byte
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pattern file whose patterns are embedded into the stream
    #[arg(long)]
    pub embed: Option<PathBuf>,
    /// Output stream file (JSONL)
    #[arg(long)]
    pub out: PathBuf,
    /// Partition the alphabet in two halves and write one stream per half
    #[arg(long, requires = "out_second")]
    pub split_labels: bool,
    /// Second output file for --split-labels
    #[arg(long, requires = "split_labels")]
    pub out_second: Option<PathBuf>,
    /// Write a per-pattern embedding report (CSV) here
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run(args: GenArgs) -> Result<(), CliError> {
    let embedded = match &args.embed {
        Some(path) => load_patterns(path)?,
        None => Vec::new(),
    };
    let alphabet = if args.alphabet.is_empty() {
        default_alphabet(args.alphabet_size)
    } else {
        args.alphabet.clone()
    };
    let config = GenConfig {
        n: args.n,
        alphabet,
        alpha: args.alpha,
        beta: args.beta,
        mu: args.mu,
        sigma: args.sigma,
        max_increment: args.max_increment,
        granularity: args.granularity.clone(),
        seed: args.seed,
        embedded,
    };
    // Config validation failures are flag mistakes, not data problems.
    let (stream, report) =
        generate_with_report(&config).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut manifest = RunManifest::new("gen");
    manifest.flag("n", args.n);
    if args.alphabet.is_empty() {
        manifest.flag("alphabet-size", args.alphabet_size);
    } else {
        manifest.flag("alphabet", args.alphabet.join(","));
    }
    manifest.flag("alpha", args.alpha);
    manifest.flag("beta", args.beta);
    manifest.flag("mu", args.mu);
    manifest.flag("sigma", args.sigma);
    manifest.flag("max-increment", args.max_increment);
    manifest.flag("granularity", &args.granularity);
    if let Some(path) = &args.embed {
        manifest.flag("embed", path.display());
        manifest.input(path)?;
    }
    manifest.switch("split-labels", args.split_labels);
    manifest.seed(args.seed);

    let mut headers = manifest.comment_lines();
    headers.push(header_line(&config));

    if args.split_labels {
        let out_second = args.out_second.as_ref().expect("clap enforces out_second");
        let half = (config.alphabet.len() + 1) / 2;
        let first_half: HashSet<&String> = config.alphabet[..half].iter().collect();
        let (first, second): (Vec<EventInstance>, Vec<EventInstance>) = stream
            .events()
            .iter()
            .cloned()
            .partition(|e| first_half.contains(&e.label));
        write_stream(&args.out, &with_labels(&headers, &config.alphabet[..half]), first)?;
        write_stream(out_second, &with_labels(&headers, &config.alphabet[half..]), second)?;
    } else {
        write_stream(&args.out, &headers, stream.events().to_vec())?;
    }

    if let Some(path) = &args.report {
        write_report(path, &manifest, &report)?;
    }
    Ok(())
}

fn with_labels(headers: &[String], labels: &[String]) -> Vec<String> {
    let mut out = headers.to_vec();
    out.push(format!("# labels: {}", labels.join(",")));
    out
}

fn write_stream(path: &Path, headers: &[String], events: Vec<EventInstance>) -> Result<(), CliError> {
    let stream = EventStream::new("gen", events).expect("generated ids are unique");
    let mut w = BufWriter::new(create_file(path)?);
    write_jsonl(&mut w, headers, &stream)
        .and_then(|()| w.flush())
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_report(path: &Path, manifest: &RunManifest, report: &GenReport) -> Result<(), CliError> {
    let mut buf = Vec::new();
    for line in manifest.comment_lines() {
        writeln!(buf, "{line}").expect("writing to a Vec cannot fail");
    }
    writeln!(buf, "# noise_events: {}", report.noise_events).expect("vec write");
    writeln!(buf, "# deliberate_events: {}", report.deliberate_events).expect("vec write");
    let mut wtr = csv::Writer::from_writer(buf);
    wtr.write_record(["pattern", "completed", "intact"])
        .map_err(|e| CliError::Data(e.to_string()))?;
    for count in &report.per_pattern {
        wtr.write_record([
            count.pattern.as_str(),
            &count.completed.to_string(),
            &count.intact.to_string(),
        ])
        .map_err(|e| CliError::Data(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
