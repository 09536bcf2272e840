//! Rendering of command results as plain text, CSV or JSON.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    #[value(name = "paper-text")]
    PaperText,
}

/// What was run, echoed at the top of every artifact.
#[derive(Clone, Debug)]
pub struct RunInfo {
    pub subcommand: String,
    pub q: String,
    pub precision_bits: u32,
    pub tail_tol: f64,
    pub params: Vec<(&'static str, String)>,
}

impl RunInfo {
    pub fn comment_line(&self) -> String {
        let mut line = format!(
            "# qasym {} {} q={} precision_bits={} tail_tol={:e}",
            env!("CARGO_PKG_VERSION"),
            self.subcommand,
            self.q,
            self.precision_bits,
            self.tail_tol
        );
        for (k, v) in &self.params {
            let _ = write!(line, " {k}={v}");
        }
        line
    }

    fn json(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.to_string(), Value::from(v.clone()))).collect();
        json!({
            "artifact": "qasym",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "q": self.q,
            "precision_bits": self.precision_bits,
            "tail_tol": format!("{:e}", self.tail_tol),
            "params": params,
        })
    }
}

/// A table plus its plain-text rendering.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub text: Vec<String>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Report::default()
        }
    }

    pub fn render(&self, info: &RunInfo, format: Format, to_file: bool) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&info.comment_line());
                out.push('\n');
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.clone(), Value::from(v.clone())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "config": info.json(), "rows": rows });
                out.push_str(&serde_json::to_string_pretty(&doc).expect("json values serialize"));
                out.push('\n');
            }
            Format::PaperText => {
                if to_file {
                    out.push_str(&info.comment_line());
                    out.push('\n');
                }
                for line in &self.text {
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
