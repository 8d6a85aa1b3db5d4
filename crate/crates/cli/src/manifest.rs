//! Reproducibility manifests embedded in output files.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::CliError;

/// Everything needed to reproduce an output file: tool version, subcommand,
/// resolved flags, SHA-256 digests of the input files, and the seed when
/// randomness is involved. Rendered as `#` comment lines in CSV/JSONL
/// outputs and as an XML comment in SVG outputs.
///
/// Manifests carry no timestamps or host information: rerunning with the
/// same flags and inputs must reproduce every output byte for byte.
pub struct RunManifest {
    subcommand: &'static str,
    flags: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
    seed: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> RunManifest {
        RunManifest { subcommand, flags: Vec::new(), inputs: Vec::new(), seed: None }
    }

    /// Records a resolved flag value.
    pub fn flag(&mut self, name: &str, value: impl Display) {
        self.flags.push((name.to_string(), value.to_string()));
    }

    /// Records a boolean switch when it is set.
    pub fn switch(&mut self, name: &str, on: bool) {
        if on {
            self.flags.push((name.to_string(), String::new()));
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Records an input file path together with the digest of its bytes.
    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        self.inputs.push((path.display().to_string(), digest));
        Ok(())
    }

    // Flag names are rendered without the leading dashes so the lines stay
    // legal inside XML comments (which must not contain `--`).
    fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "cooccur {} {}",
            env!("CARGO_PKG_VERSION"),
            self.subcommand
        )];
        for (name, value) in &self.flags {
            if value.is_empty() {
                out.push(format!("flag: {name}"));
            } else {
                out.push(format!("flag: {name}={value}"));
            }
        }
        for (path, digest) in &self.inputs {
            out.push(format!("input: {path} sha256={digest}"));
        }
        if let Some(seed) = self.seed {
            out.push(format!("seed: {seed}"));
        }
        out
    }

    /// The manifest as `#` comment lines for CSV and JSONL outputs.
    pub fn comment_lines(&self) -> Vec<String> {
        self.lines().into_iter().map(|l| format!("# {l}")).collect()
    }

    /// The manifest as a single XML comment for SVG outputs.
    pub fn xml_comment(&self) -> String {
        let mut out = String::from("<!--\n");
        for line in self.lines() {
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("-->\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comment_lines_cover_flags_inputs_and_seed() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        fs::write(&input, "hello").unwrap();

        let mut m = RunManifest::new("gen");
        m.flag("n", 100);
        m.switch("split-labels", true);
        m.switch("prefixes", false);
        m.input(&input).unwrap();
        m.seed(7);

        let lines = m.comment_lines();
        assert_eq!(lines[0], format!("# cooccur {} gen", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[1], "# flag: n=100");
        assert_eq!(lines[2], "# flag: split-labels");
        assert!(lines[3].starts_with("# input: ") && lines[3].contains("sha256="));
        // SHA-256 of "hello".
        assert!(lines[3].ends_with("2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"));
        assert_eq!(lines[4], "# seed: 7");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn xml_comment_contains_no_double_dash() {
        let mut m = RunManifest::new("matrix");
        m.flag("dt", "15,30,60");
        m.flag("mode", "auto");
        let comment = m.xml_comment();
        assert!(comment.starts_with("<!--\n") && comment.ends_with("-->\n"));
        let body = &comment[4..comment.len() - 4];
        assert!(!body.contains("--"), "XML comment body must not contain --: {body}");
    }

    #[test]
    fn missing_input_is_a_data_error() {
        let mut m = RunManifest::new("count");
        match m.input(Path::new("/nonexistent/x.jsonl")) {
            Err(CliError::Data(msg)) => assert!(msg.contains("/nonexistent/x.jsonl")),
            other => panic!("expected data error, got {other:?}"),
        }
    }
}
