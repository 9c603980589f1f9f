use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Two-column quantity/value table.
    pub fn pairs(items: impl IntoIterator<Item = (String, Cell)>) -> Self {
        let mut t = Table::new(["quantity", "value"]);
        for (k, v) in items {
            t.push(vec![Cell::Text(k), v]);
        }
        t
    }
}

/// Effective settings of one run, embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub settings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub artifact: String,
    pub version: String,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
        Cell::Num(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

pub fn render_csv(doc: &Document) -> String {
    let mut out = format!("# {} {}\n# command = {}\n", doc.artifact, doc.version, doc.config.command);
    for (k, v) in &doc.config.settings {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out.push_str(&doc.columns.join(","));
    out.push('\n');
    for row in &doc.rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn emit(table: Table, config: RunConfig, format: Format, path: &Path) -> Result<()> {
    anyhow::ensure!(!table.rows.is_empty(), "nothing to write");
    let doc = Document {
        artifact: "tritrophic".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        columns: table.columns,
        rows: table.rows,
    };
    let text = match format {
        Format::Csv => render_csv(&doc),
        Format::Json => serde_json::to_string_pretty(&doc)? + "\n",
    };
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> Document {
        Document {
            artifact: "tritrophic".into(),
            version: "0".into(),
            config: RunConfig {
                command: "orbit".into(),
                settings: BTreeMap::from([("mu".to_string(), "2.5".to_string())]),
            },
            columns: vec!["n".into(), "x".into()],
            rows: vec![vec![Cell::Num(1.0), Cell::Num(0.1 + 0.2)]],
        }
    }

    #[test]
    fn csv_has_header_block_and_seventeen_digits() {
        let s = render_csv(&doc());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# tritrophic 0");
        assert_eq!(lines[2], "# mu = 2.5");
        assert_eq!(lines[3], "n,x");
        assert_eq!(lines[4], "1.0000000000000000e0,3.0000000000000004e-1");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn csv_values_parse_back_exactly() {
        let v = 0.1 + 0.2;
        let s = csv_cell(&Cell::Num(v));
        assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut d = doc();
        d.rows.push(vec![Cell::Num(std::f64::consts::PI), Cell::Num(1e-300 / 3.0)]);
        let back: Document = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
