//! Tabular reports written as CSV (default) or JSON.
//!
//! Output is a pure function of the contents: floats use the shortest
//! round-trip representation and JSON objects have sorted keys.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL: &str = "imgtn";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| Value::String(v.to_string()), Value::from),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or_else(|| Value::String(format_float(*v)), Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Shortest representation that parses back to the same value; scientific
/// notation outside `[1e-4, 1e16)`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 || (v.is_finite() && (1e-4..1e16).contains(&v.abs())) {
        format!("{v}")
    } else if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

macro_rules! cell_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
cell_from_int!(usize, u64, u32, u128, i64, i32);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Panics if the row width differs from the header; rows are built in
    /// code, so a mismatch is a bug.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    /// Echo of the effective configuration.
    pub config: Map<String, Value>,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub elapsed_seconds: Option<f64>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Map<String, Value>) -> Self {
        Self {
            command: command.into(),
            config,
            notes: Vec::new(),
            tables: Vec::new(),
            elapsed_seconds: None,
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// `#` header lines, then one block per table separated by two blank
    /// lines (gnuplot's dataset separator).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool={TOOL} version={VERSION}");
        let _ = writeln!(out, "# command={}", self.command);
        let _ = writeln!(out, "# config={}", Value::Object(self.config.clone()));
        for note in &self.notes {
            let _ = writeln!(out, "# note: {note}");
        }
        if let Some(t) = self.elapsed_seconds {
            let _ = writeln!(out, "# elapsed_s={}", format_float(t));
        }
        for (idx, table) in self.tables.iter().enumerate() {
            out.push_str(if idx == 0 { "\n" } else { "\n\n" });
            let _ = writeln!(out, "# table: {}", table.name);
            let _ = writeln!(out, "{}", table.columns.join(","));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            t.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::json!({ "name": t.name, "columns": t.columns, "rows": rows })
            })
            .collect();
        let mut obj = serde_json::json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": Value::Object(self.config.clone()),
            "notes": self.notes,
            "tables": tables,
        });
        if let Some(t) = self.elapsed_seconds {
            obj["elapsed_s"] = serde_json::json!(t);
        }
        obj
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report is valid JSON");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut config = Map::new();
        config.insert("n".into(), 4.into());
        config.insert("family".into(), "rect".into());
        let mut r = Report::new("certify", config);
        r.note("padded to 4");
        let mut t = Table::new("ranks", &["i", "y", "rank", "ok", "dev"]);
        t.push(vec![1usize.into(), "0110".into(), 2usize.into(), true.into(), 0.1.into()]);
        t.push(vec![2usize.into(), "a,b".into(), 0usize.into(), false.into(), 1e-300.into()]);
        r.tables.push(t);
        r.tables.push(Table::new("empty", &["x"]));
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let expected = format!(
            "# tool=imgtn version={VERSION}\n# command=certify\n# config={{\"family\":\"rect\",\"n\":4}}\n# note: padded to 4\n\n# table: ranks\ni,y,rank,ok,dev\n1,0110,2,true,0.1\n2,\"a,b\",0,false,1e-300\n\n\n# table: empty\nx\n"
        );
        assert_eq!(csv, expected);
    }

    #[test]
    fn json_is_stable_and_parses() {
        let a = sample().to_json();
        assert_eq!(a, sample().to_json());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["tables"][0]["rows"][0]["rank"], 2);
        assert_eq!(v["config"]["n"], 4);
        assert!(v.get("elapsed_s").is_none());
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 0.1, 1.0 / 3.0, 1e-17, 123456789.125, -2.5e300, 1e16] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(f64::NAN), "nan");
    }
}
