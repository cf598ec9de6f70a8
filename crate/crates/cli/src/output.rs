use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// Pretty JSON with a trailing newline; keys come out sorted.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn write_to(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).context("writing to stdout")?;
    Ok(())
}

/// Report to `--out` when given, otherwise stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_to(p, text),
        None => print(text),
    }
}

/// Writes `report` to `--out` and the summary to stdout, or only the summary
/// to stdout when the report has nowhere to go and is not asked for.
pub fn emit_with_summary(out: Option<&Path>, report: &str, summary: &Value) -> Result<()> {
    match out {
        Some(p) => {
            write_to(p, report)?;
            print(&json_text(summary))
        }
        None => print(report),
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
