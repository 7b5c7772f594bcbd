//! Record emission. JSON-lines output carries a header record (command and
//! full configuration), one flat record per data row, optional extra records
//! such as fits, and a footer with the wall time. CSV output is a bare header
//! line plus scalar rows, with no surrounding metadata, so reruns are fully
//! byte-identical. The wall time in the JSON footer is the only field allowed
//! to differ between identical runs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde_json::{Map, Value};

use crate::{CliError, Format};

pub fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn tagged(mut value: Value, tag: &str) -> Value {
    if let Some(map) = value.as_object_mut() {
        map.insert("record".into(), Value::String(tag.into()));
    }
    value
}

fn is_scalar(value: &Value) -> bool {
    !matches!(value, Value::Array(_) | Value::Object(_))
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub struct RunOutput {
    pub command: &'static str,
    pub config: Value,
    pub data: Vec<Value>,
    /// Records appended after the data in JSON mode and omitted from CSV.
    pub extras: Vec<Value>,
}

pub fn emit_records(
    mut w: Box<dyn Write>,
    format: Format,
    output: RunOutput,
    walltime_ms: u64,
) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let header = tagged(
                serde_json::json!({
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": output.command,
                    "config": output.config,
                }),
                "header",
            );
            writeln!(w, "{header}")?;
            for value in output.data {
                writeln!(w, "{}", tagged(value, "data"))?;
            }
            for value in output.extras {
                writeln!(w, "{value}")?;
            }
            let footer = tagged(
                serde_json::json!({
                    "command": output.command,
                    "walltime_ms": walltime_ms,
                }),
                "footer",
            );
            writeln!(w, "{footer}")?;
        }
        Format::Csv => {
            let columns: Vec<String> = match output.data.first().and_then(Value::as_object) {
                Some(map) => map
                    .iter()
                    .filter(|(_, v)| is_scalar(v))
                    .map(|(k, _)| k.clone())
                    .collect(),
                None => Vec::new(),
            };
            if !columns.is_empty() {
                writeln!(w, "{}", columns.join(","))?;
                let empty = Map::new();
                for value in &output.data {
                    let map = value.as_object().unwrap_or(&empty);
                    let row: Vec<String> = columns
                        .iter()
                        .map(|c| map.get(c).map(csv_cell).unwrap_or_default())
                        .collect();
                    writeln!(w, "{}", row.join(","))?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Whitespace-separated numeric table with a `#`-prefixed header line.
pub fn emit_table(
    mut w: Box<dyn Write>,
    columns: &[String],
    rows: &[Vec<Value>],
) -> Result<(), CliError> {
    writeln!(w, "# {}", columns.join(" "))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        writeln!(w, "{}", cells.join(" "))?;
    }
    w.flush()?;
    Ok(())
}
