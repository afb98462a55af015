//! Run manifests and the JSON/CSV writers.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything needed to rerun an invocation.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock
    /// so that repeated runs can be byte-identical.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, flags: Value, seed: Option<u64>) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs())
            });
        RunManifest {
            subcommand: subcommand.to_string(),
            flags,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp,
        }
    }
}

/// A float with 17 significant digits; non-finite values become strings.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("valid number"))
    } else {
        Value::String(x.to_string())
    }
}

/// An exact integer of any size.
pub fn integer(x: &BigUint) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("valid number"))
}

/// Serializes `x` and rewrites every float to 17 significant digits.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    normalize(serde_json::to_value(x).expect("serializable"))
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => float(n.as_f64().expect("float")),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// A result: a JSON body plus, for tabular results, CSV rows.
pub struct Artifact {
    pub body: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Artifact {
    pub fn new(body: Value) -> Self {
        Artifact { body, table: None }
    }

    pub fn with_table(body: Value, header: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        Artifact {
            body,
            table: Some(Table { header, rows }),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// JSON: `{"manifest": …, "result": …}`. CSV: a `# manifest: …` comment
/// line, then the table; non-tabular results become `key,value` rows.
pub fn render(manifest: &RunManifest, artifact: &Artifact, format: Format) -> io::Result<Vec<u8>> {
    let manifest_json = to_value(manifest);
    match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("manifest".into(), manifest_json);
            doc.insert("result".into(), artifact.body.clone());
            let mut out = serde_json::to_vec_pretty(&Value::Object(doc))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = format!("# manifest: {manifest_json}\n").into_bytes();
            let mut w = csv::Writer::from_writer(&mut out);
            match &artifact.table {
                Some(t) => {
                    w.write_record(&t.header)?;
                    for row in &t.rows {
                        w.write_record(row.iter().map(cell))?;
                    }
                }
                None => {
                    w.write_record(["key", "value"])?;
                    let flat = match &artifact.body {
                        Value::Object(o) => o.iter().map(|(k, v)| (k.clone(), cell(v))).collect(),
                        other => vec![("value".to_string(), cell(other))],
                    };
                    for (k, v) in flat {
                        w.write_record([k, v])?;
                    }
                }
            }
            w.flush()?;
            drop(w);
            Ok(out)
        }
    }
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(float(-2.0).to_string(), "-2.0000000000000000e+0");
        assert_eq!(float(f64::NAN), Value::String("NaN".into()));
        let v = to_value(&serde_json::json!({"a": [1.5, 2], "b": {"c": 0.25}}));
        assert_eq!(
            v.to_string(),
            r#"{"a":[1.5000000000000000e+0,2],"b":{"c":2.5000000000000000e-1}}"#
        );
    }

    #[test]
    fn big_integers_are_exact() {
        let x = BigUint::from(10u32).pow(30);
        assert_eq!(integer(&x).to_string(), "1000000000000000000000000000000");
    }

    #[test]
    fn csv_quotes_cells() {
        let m = RunManifest::new("x", Value::Null, None);
        let a = Artifact::with_table(
            Value::Null,
            vec!["p"],
            vec![vec![Value::String("{1,2}".into())]],
        );
        let s = String::from_utf8(render(&m, &a, Format::Csv).unwrap()).unwrap();
        assert!(s.ends_with("p\n\"{1,2}\"\n"), "{s}");
    }
}
