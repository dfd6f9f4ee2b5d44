use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bellhide_core::tolerance::{BOUND_TOL, ENTRY_TOL, PPT_TOL};
use bellhide_core::VERSION;
use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const OUTPUT_DIR_ENV: &str = "BELLHIDE_OUTPUT_DIR";

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Flat table used for CSV rendering.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A finished command: echoed configuration, JSON result, CSV table and an
/// optional trailing summary.
pub struct Report {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub result: Value,
    pub table: Table,
    /// Emit as JSON lines (header, one line per row, summary) instead of one document.
    pub stream: bool,
    pub summary: Option<Value>,
    /// Checks that did not hold; reported after the output is written.
    pub failures: Vec<String>,
}

pub fn assumptions() -> Value {
    json!({
        "log_base": 2,
        "block_size_rule": "ceil of the large-k estimate",
        "prior": "P(B=0)",
        "ppt_tol": PPT_TOL,
        "bound_tol": BOUND_TOL,
        "entry_tol": ENTRY_TOL,
    })
}

fn header(command: &str, config: &Map<String, Value>) -> Map<String, Value> {
    let mut h = Map::new();
    h.insert("version".into(), json!(VERSION));
    h.insert("command".into(), json!(command));
    h.insert("config".into(), Value::Object(config.clone()));
    h.insert("assumptions".into(), assumptions());
    h
}

/// Cell text shared by CSV rows: rationals as `p/q`, everything else as its
/// JSON text without quotes.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Object(m) if m.contains_key("num") && m.contains_key("den") => {
            let part = |k: &str| match &m[k] {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let den = part("den");
            if den == "1" {
                part("num")
            } else {
                format!("{}/{}", part("num"), den)
            }
        }
        other => other.to_string(),
    }
}

impl Report {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        match format {
            Format::Json if self.stream => {
                serde_json::to_writer(&mut out, &Value::Object(header(self.command, &self.config)))?;
                out.push(b'\n');
                for row in &self.table.rows {
                    let obj: Map<String, Value> = self
                        .table
                        .columns
                        .iter()
                        .zip(row)
                        .filter(|(_, v)| !v.is_null())
                        .map(|(c, v)| (c.to_string(), v.clone()))
                        .collect();
                    serde_json::to_writer(&mut out, &Value::Object(obj))?;
                    out.push(b'\n');
                }
                if let Some(s) = &self.summary {
                    serde_json::to_writer(&mut out, &json!({ "summary": s }))?;
                    out.push(b'\n');
                }
            }
            Format::Json => {
                let mut doc = header(self.command, &self.config);
                doc.insert("result".into(), self.result.clone());
                if let Some(s) = &self.summary {
                    doc.insert("summary".into(), s.clone());
                }
                serde_json::to_writer_pretty(&mut out, &Value::Object(doc))?;
                out.push(b'\n');
            }
            Format::Csv => {
                writeln!(out, "# bellhide {VERSION}")?;
                writeln!(out, "# command: {}", self.command)?;
                writeln!(out, "# config: {}", Value::Object(self.config.clone()))?;
                writeln!(out, "# assumptions: {}", assumptions())?;
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&self.table.columns)?;
                    for row in &self.table.rows {
                        w.write_record(row.iter().map(cell))?;
                    }
                    w.flush()?;
                }
                if let Some(s) = &self.summary {
                    writeln!(out, "# summary: {s}")?;
                }
            }
        }
        Ok(out)
    }
}

/// Where output goes: an explicit path (relative paths resolve against
/// the output-directory variable when it is set), `<dir>/<command>.<ext>`
/// when only the variable is set, otherwise stdout.
pub fn destination(output: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from);
    match (output, dir) {
        (Some(p), _) if p == Path::new("-") => None,
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{command}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub fn write_bytes(dest: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match dest {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, bytes)?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(cell(&json!({"num": 2, "den": 3})), "2/3");
        assert_eq!(cell(&json!({"num": 4, "den": 1})), "4");
        assert_eq!(cell(&json!({"num": "123456789012345678901", "den": "7"})), "123456789012345678901/7");
        assert_eq!(cell(&json!(0.1)), "0.1");
        assert_eq!(cell(&json!(true)), "true");
        assert_eq!(cell(&json!("11.00")), "11.00");
        assert_eq!(cell(&Value::Null), "");
    }

    #[test]
    fn csv_has_comment_header() {
        let mut table = Table::new(&["a", "b"]);
        table.push(vec![json!(1), json!({"num": 1, "den": 2})]);
        let r = Report {
            command: "x",
            config: Map::new(),
            result: Value::Null,
            table,
            stream: false,
            summary: None,
            failures: Vec::new(),
        };
        let text = String::from_utf8(r.render(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# bellhide "));
        assert_eq!(lines[4], "a,b");
        assert_eq!(lines[5], "1,1/2");
    }
}
