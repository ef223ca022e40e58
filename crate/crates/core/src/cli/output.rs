//! CSV tables and the JSON report envelope.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::RawConfig;

pub const TOOLKIT: &str = "hvdc-taplab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `x` with nine significant digits, period decimal separator,
/// trailing zeros trimmed. Non-finite values print as `NaN`/`inf`/`-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Rectangular table with a single header row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Infeasible,
}

/// Everything a command produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub status: Status,
    pub output: Value,
    pub violations: Vec<Value>,
    pub diagnostics: Vec<String>,
    /// Named CSV tables; the file is `<command>.csv` or `<command>_<name>.csv`
    /// when `name` is non-empty.
    pub tables: Vec<(String, Table)>,
}

pub fn tolerances() -> Value {
    json!({
        "constraint_relative": 1e-9,
        "csv_significant_digits": SIGNIFICANT_DIGITS,
        "lpc_max_alpha_deg": crate::eflcc::LPC_MAX_ALPHA_DEG,
    })
}

pub fn report(outcome: &Outcome, input: &RawConfig) -> Value {
    json!({
        "toolkit": TOOLKIT,
        "version": VERSION,
        "command": outcome.command,
        "status": outcome.status,
        "input": input,
        "tolerances": tolerances(),
        "output": outcome.output,
        "violations": outcome.violations,
        "diagnostics": outcome.diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Writes the artifacts into `dir`, returning the paths written.
pub fn write_outcome(
    outcome: &Outcome,
    input: &RawConfig,
    dir: &Path,
    format: Format,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.csv() {
        for (name, table) in &outcome.tables {
            let file = if name.is_empty() {
                format!("{}.csv", outcome.command)
            } else {
                format!("{}_{name}.csv", outcome.command)
            };
            let path = dir.join(file);
            fs::write(&path, table.to_csv()?)?;
            written.push(path);
        }
    }
    if format.json() {
        let path = dir.join(format!("{}.json", outcome.command));
        let mut text =
            serde_json::to_string_pretty(&report(outcome, input)).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
