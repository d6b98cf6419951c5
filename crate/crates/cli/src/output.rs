//! Record writers. Floats are printed with 17 significant digits so that every
//! value parses back to the same `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecordFormat {
    Csv,
    Jsonl,
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compact JSON with fixed-precision floats.
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(out: &mut W, value: &T) -> Result<(), CliError> {
    let mut ser = Serializer::with_formatter(&mut *out, Sig17);
    value.serialize(&mut ser)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_json(&mut buf, value)?;
    buf.pop();
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn cell(v: &Value) -> Result<String, CliError> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        nested => to_json_line(nested)?,
    })
}

/// Writes one record per line (JSONL) or a CSV table with a header row.
/// CSV columns follow the field order of the first record.
pub fn write_records<T: Serialize, W: Write>(out: &mut W, records: &[T], format: RecordFormat) -> Result<(), CliError> {
    match format {
        RecordFormat::Jsonl => {
            for r in records {
                write_json(out, r)?;
            }
        }
        RecordFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let mut header: Option<Vec<String>> = None;
            for r in records {
                let Value::Object(map) = serde_json::to_value(r)? else {
                    return Err(CliError::Usage("CSV output needs flat records".into()));
                };
                if header.is_none() {
                    let keys: Vec<String> = map.keys().cloned().collect();
                    w.write_record(&keys)?;
                    header = Some(keys);
                }
                let keys = header.as_ref().expect("set above");
                let row: Vec<String> =
                    keys.iter().map(|k| cell(map.get(k).unwrap_or(&Value::Null))).collect::<Result<_, _>>()?;
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Standard output, or a buffered file when a path is given.
pub fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use serde::Deserialize;

    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        name: String,
        x: f64,
        n: Option<usize>,
        flag: bool,
    }

    fn rows() -> Vec<Row> {
        vec![
            Row { name: "a".into(), x: 0.1 + 0.2, n: Some(3), flag: true },
            Row { name: "b".into(), x: -1.0 / 3.0, n: None, flag: false },
        ]
    }

    #[test]
    fn floats_have_17_significant_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(to_json_line(&[1.0f64]).unwrap(), "[1.0000000000000000e0]");
    }

    #[test]
    fn jsonl_round_trip() {
        let mut buf = Vec::new();
        write_records(&mut buf, &rows(), RecordFormat::Jsonl).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back: Vec<Row> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(back, rows());
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_records(&mut buf, &rows(), RecordFormat::Csv).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(r.headers().unwrap(), vec!["name", "x", "n", "flag"]);
        let back: Vec<Row> = r.deserialize().map(|x| x.unwrap()).collect();
        assert_eq!(back, rows());
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_json_line(&[f64::NAN]).unwrap(), "[null]");
    }
}
