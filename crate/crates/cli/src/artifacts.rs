//! JSON and CSV emission. Every artifact carries the seed.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use contraction_lab::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Matrix as rows of `[re, im]` pairs.
pub fn matrix_rows(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

pub struct Artifacts {
    command: String,
    result: Value,
    tables: Vec<(String, Vec<Value>)>,
    seed: Option<u64>,
}

impl Artifacts {
    pub fn new(command: &str, result: Value) -> Self {
        Self {
            command: command.to_string(),
            result,
            tables: Vec::new(),
            seed: None,
        }
    }

    pub fn table<T: Serialize>(&mut self, name: &str, rows: &[T]) {
        let rows = rows.iter().map(|r| serde_json::to_value(r).expect("serializable row")).collect();
        self.tables.push((name.to_string(), rows));
    }

    /// Records a seed other than the command-line one.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn envelope(&self, seed: u64) -> Value {
        json!({
            "command": self.command,
            "seed": seed,
            "result": self.result,
        })
    }

    pub fn emit(&self, dir: Option<&Path>, format: Format, seed: u64) -> io::Result<()> {
        let seed = self.seed.unwrap_or(seed);
        let json_text = serde_json::to_string_pretty(&self.envelope(seed))? + "\n";
        let want_json = matches!(format, Format::Json | Format::Both);
        let want_csv = matches!(format, Format::Csv | Format::Both);
        match dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                if want_json {
                    fs::write(dir.join(format!("{}.json", self.command)), &json_text)?;
                }
                if want_csv {
                    for (name, rows) in &self.tables {
                        fs::write(dir.join(format!("{name}.csv")), csv_text(rows, seed)?)?;
                    }
                }
            }
            None => {
                let mut out = io::stdout().lock();
                if want_json {
                    out.write_all(json_text.as_bytes())?;
                }
                if want_csv {
                    for (name, rows) in &self.tables {
                        writeln!(out, "# {name}")?;
                        out.write_all(&csv_text(rows, seed)?)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows are JSON objects sharing the keys of the first row.
fn csv_text(rows: &[Value], seed: u64) -> io::Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let keys: Vec<String> = match rows.first() {
        Some(Value::Object(map)) => map.keys().cloned().collect(),
        _ => Vec::new(),
    };
    let mut header = vec!["seed".to_string()];
    header.extend(keys.iter().cloned());
    writer.write_record(&header)?;
    for row in rows {
        let mut record = vec![seed.to_string()];
        record.extend(keys.iter().map(|k| row.get(k).map(cell).unwrap_or_default()));
        writer.write_record(&record)?;
    }
    writer.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_keeps_field_order_and_seed() {
        #[derive(Serialize)]
        struct Row {
            n: usize,
            value: f64,
        }
        let rows = [Row { n: 2, value: 0.5 }, Row { n: 3, value: 0.25 }];
        let rows: Vec<Value> = rows.iter().map(|r| serde_json::to_value(r).unwrap()).collect();
        let text = String::from_utf8(csv_text(&rows, 7).unwrap()).unwrap();
        assert_eq!(text, "seed,n,value\n7,2,0.5\n7,3,0.25\n");
    }
}
