use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv | json)")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Table of results plus the resolved configuration that produced it.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: BTreeMap<String, String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Free-form trailing lines (schedules, per-point summaries).
    pub notes: Vec<String>,
    pub summary: Vec<(String, Value)>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Report {
            command,
            config: BTreeMap::new(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
            summary: Vec::new(),
            pass: true,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut s = format!("# graphbus {} {}\n", self.command, env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.config {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# {k}: {}", csv_cell(v));
        }
        let _ = writeln!(s, "# result: {}", if self.pass { "pass" } else { "fail" });
        s
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let summary: Map<String, Value> = self.summary.iter().cloned().collect();
        let v = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "rows": rows,
            "notes": self.notes,
            "summary": summary,
            "pass": self.pass,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = Report::new("demo", vec!["a", "b"]);
        r.set("sites", 6);
        r.rows.push(vec![json!(1), json!("x,y")]);
        r.summary("max", 0.5);
        let s = r.render(Format::Csv);
        assert_eq!(
            s,
            concat!("# graphbus demo ", env!("CARGO_PKG_VERSION"), "\n# sites = 6\na,b\n1,\"x,y\"\n# max: 0.5\n# result: pass\n")
        );
    }

    #[test]
    fn json_layout() {
        let mut r = Report::new("demo", vec!["a"]);
        r.rows.push(vec![json!(2.5)]);
        r.pass = false;
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["rows"][0]["a"], json!(2.5));
        assert_eq!(v["pass"], json!(false));
    }
}
