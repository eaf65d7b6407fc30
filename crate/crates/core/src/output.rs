//! CSV and JSON artifacts.
//!
//! Every file carries the resolved run configuration: CSV as a leading
//! `# config: {...}` comment line, JSON as a top-level `config` field. Numbers
//! in CSV are written with 17 significant digits so that they round-trip.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// `x` with 17 significant digits; non-finite values as `NaN`, `inf`, `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Empty cell for `None`.
pub fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn escape_cell(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// In-memory CSV document.
#[derive(Debug, Clone)]
pub struct CsvTable {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Adds `# config: <compact json>` as a header comment.
    pub fn with_config<C: Serialize>(mut self, config: &C) -> Self {
        let json = serde_json::to_string(config).expect("config serializes");
        self.comments.push(format!("config: {json}"));
        self
    }

    pub fn comment(mut self, text: impl Into<String>) -> Self {
        self.comments.push(text.into());
        self
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push_row(row.iter().map(|&x| format_number(x)).collect());
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let line = |cells: &[String]| cells.iter().map(|c| escape_cell(c)).collect::<Vec<_>>().join(",");
        out.push_str(&line(&self.columns));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.render())
    }
}

/// `{"config": config, "<key>": payload}` pretty-printed with a trailing newline.
pub fn json_document<C: Serialize, P: Serialize>(config: &C, key: &str, payload: &P) -> String {
    let mut map = serde_json::Map::new();
    map.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    map.insert(key.into(), serde_json::to_value(payload).expect("payload serializes"));
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("json value serializes");
    s.push('\n');
    s
}

pub fn write_json<C: Serialize, P: Serialize>(path: &Path, config: &C, key: &str, payload: &P) -> io::Result<()> {
    fs::write(path, json_document(config, key, payload))
}
