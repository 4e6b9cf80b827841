//! Table rendering shared by every subcommand: CSV (default) or JSON, to
//! stdout or a file.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Output encodings selectable with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(raw: &str) -> Result<Self, CliError> {
        match raw {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// One typed cell of a result row.
#[derive(Debug, Clone, Copy)]
pub enum Field {
    Int(u64),
    Num(f64),
}

/// A rectangular result set with a fixed header row.
#[derive(Debug)]
pub struct Table {
    headers: &'static [&'static str],
    csv_rows: Vec<String>,
    json_rows: Vec<serde_json::Value>,
}

impl Table {
    pub fn new(headers: &'static [&'static str]) -> Self {
        Table {
            headers,
            csv_rows: Vec::new(),
            json_rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, fields: &[Field]) {
        assert_eq!(
            fields.len(),
            self.headers.len(),
            "row width must match the header row"
        );
        let cells: Vec<String> = fields
            .iter()
            .map(|field| match field {
                Field::Int(n) => n.to_string(),
                Field::Num(x) => cell(*x),
            })
            .collect();
        self.csv_rows.push(cells.join(","));
        let mut object = serde_json::Map::new();
        for (header, field) in self.headers.iter().zip(fields) {
            let value = match field {
                Field::Int(n) => serde_json::json!(n),
                Field::Num(x) => serde_json::json!(x),
            };
            object.insert((*header).to_string(), value);
        }
        self.json_rows.push(serde_json::Value::Object(object));
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut text = self.headers.join(",");
                text.push('\n');
                for row in &self.csv_rows {
                    text.push_str(row);
                    text.push('\n');
                }
                text
            }
            Format::Json => {
                let rows = serde_json::Value::Array(self.json_rows.clone());
                let mut text = serde_json::to_string_pretty(&rows)
                    .expect("tables of finite numbers always serialize");
                text.push('\n');
                text
            }
        }
    }
}

/// Fixed-precision scientific notation keeps the output byte-stable across
/// repeated runs with the same arguments.
fn cell(x: f64) -> String {
    format!("{x:.12e}")
}

/// Relative output paths are taken under `$HYPERENT_OUT_DIR` when that
/// variable is set; absolute paths are used as given.
pub fn resolve_out_path(out: &Path) -> PathBuf {
    if out.is_relative() {
        if let Some(dir) = std::env::var_os("HYPERENT_OUT_DIR") {
            return PathBuf::from(dir).join(out);
        }
    }
    out.to_path_buf()
}

pub fn write_table(table: &Table, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let rendered = table.render(format);
    match out {
        Some(path) => {
            let path = resolve_out_path(path);
            std::fs::write(&path, rendered)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(rendered.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
    }
}
