//! CSV and JSON writers.
//!
//! Floats are written in Rust's shortest round-trip form, which never uses
//! locale-dependent separators.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::Canonical;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A numeric table with optional trailing notes and JSON-only extras.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// `key = value` notes, written as trailing `#` lines in CSV.
    pub notes: Vec<(String, Value)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &Canonical) -> String {
        let mut s = format!("# config: {}\n", config.to_line());
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{x}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for (k, v) in &self.notes {
            s.push_str(&format!("# {k} = {}\n", note_text(v)));
        }
        s
    }

    pub fn to_json(&self, config: &Canonical) -> Value {
        let mut obj = json!({
            "schema": 1,
            "command": config.command,
            "config": config.to_json(),
            "columns": self.columns,
            "rows": self.rows,
        });
        for (k, v) in &self.notes {
            obj[k.as_str()] = v.clone();
        }
        obj
    }

    pub fn render(&self, format: Format, config: &Canonical) -> String {
        match format {
            Format::Csv => self.to_csv(config),
            Format::Json => json_text(&self.to_json(config)),
        }
    }
}

fn note_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Write to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Read a CSV written by [`Table::to_csv`]: header names and numeric rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or("missing header")?;
    let cols: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = vec![];
    for l in lines {
        let r: Result<Vec<f64>, _> = l.split(',').map(str::parse::<f64>).collect();
        rows.push(r.map_err(|e| format!("{l:?}: {e}"))?);
    }
    Ok((cols, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn csv_round_trips_values() {
        let cfg = Canonical { command: "x".into(), values: BTreeMap::new() };
        let mut t = Table::new(&["v", "mu"]);
        t.push(vec![-2.0, 0.1 + 0.2]);
        t.push(vec![1e-300, f64::MIN_POSITIVE]);
        t.notes.push(("norm".into(), json!(1.0)));
        let text = t.to_csv(&cfg);
        assert!(text.starts_with("# config: command=x\nv,mu\n-2,0.30000000000000004\n"));
        assert!(text.ends_with("# norm = 1.0\n"));
        let (cols, rows) = read_csv(&text).unwrap();
        assert_eq!(cols, vec!["v", "mu"]);
        assert_eq!(rows, t.rows);
    }
}
