use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

fn io_error(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

/// Streams into a temporary sibling of `path` and renames it into place,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    let tmp = temp_path(path);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp).map_err(io_error(&tmp))?);
        body(&mut w)?;
        w.into_inner().map_err(|e| io_error(&tmp)(e.into_error()))?.sync_all().map_err(io_error(&tmp))?;
        fs::rename(&tmp, path).map_err(io_error(path))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Writes `content` to `out`, or to standard output.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, |w| w.write_all(content.as_bytes()).map_err(io_error(path))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Input(format!("standard output: {e}")))
        }
    }
}

/// A flat result table rendered in any output format.
pub struct Rows {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<serde_json::Value>>,
}

fn cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Rows {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Rows { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<serde_json::Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let objs: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|r| self.headers.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect())
                    .collect();
                let doc = serde_json::json!({ "schema_version": 1, "rows": objs });
                let mut s = serde_json::to_string_pretty(&doc).expect("rows serialise");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = self.headers.join(",");
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&r.iter().map(cell).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                out
            }
            Format::Table => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
                let widths: Vec<usize> = self
                    .headers
                    .iter()
                    .enumerate()
                    .map(|(i, h)| cells.iter().map(|r| r[i].chars().count()).chain([h.len()]).max().unwrap_or(0))
                    .collect();
                let line = |fields: Vec<&str>| {
                    let padded: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
                    let mut l = padded.join("  ").trim_end().to_string();
                    l.push('\n');
                    l
                };
                let mut out = line(self.headers.clone());
                for r in &cells {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                }
                out
            }
        }
    }
}
