//! Flat result records and their CSV/JSON encodings.
//!
//! Floats are written with 17 significant digits so values round-trip
//! exactly. Non-finite floats become `inf`, `-inf` or `nan` (quoted in JSON).

use std::fmt::Write as _;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i128),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i128)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i128)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

fn float_text(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// One output row; keys keep insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new(experiment: &str) -> Self {
        Self::default().with("experiment", experiment)
    }

    pub fn with(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.fields.push((key, v.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|(k, _)| *k)
    }
}

/// Wall-clock bookkeeping appended to every record.
#[derive(Clone, Copy, Debug)]
pub struct Clock {
    deterministic: bool,
}

impl Clock {
    pub fn new(deterministic: bool) -> Self {
        Self { deterministic }
    }

    pub fn start(&self) -> Instant {
        Instant::now()
    }

    pub fn elapsed_ms(&self, started: Instant) -> f64 {
        if self.deterministic { 0.0 } else { started.elapsed().as_secs_f64() * 1e3 }
    }

    pub fn stamp(&self, rec: Record, started: Instant) -> Record {
        let ms = self.elapsed_ms(started);
        self.stamp_ms(rec, ms)
    }

    /// Append a runtime measured earlier.
    pub fn stamp_ms(&self, rec: Record, runtime_ms: f64) -> Record {
        let unix = if self.deterministic {
            0
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        };
        rec.with("timestamp", unix).with("runtime_ms", runtime_ms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Csv => render_csv(records),
        Format::Json => render_json(records),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(x) => float_text(*x),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::Text(s) => s.clone(),
    }
}

fn render_csv(records: &[Record]) -> String {
    let mut out = String::new();
    let mut header: Option<Vec<&str>> = None;
    for r in records {
        let keys: Vec<&str> = r.keys().collect();
        if header.as_ref() != Some(&keys) {
            // A new table starts whenever the column set changes.
            if header.is_some() {
                out.push('\n');
            }
            out.push_str(&keys.join(","));
            out.push('\n');
            header = Some(keys);
        }
        let cells: Vec<String> = r.fields.iter().map(|(_, v)| csv_cell(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(x) if x.is_finite() => float_text(*x),
        Value::Float(x) => format!("\"{}\"", float_text(*x)),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => serde_json::to_string(s).expect("string serializes"),
    }
}

fn render_json(records: &[Record]) -> String {
    let mut out = String::from("[");
    for (i, r) in records.iter().enumerate() {
        out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
        for (j, (k, v)) in r.fields.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{k}\": {}", json_value(v));
        }
        out.push('}');
    }
    out.push_str(if records.is_empty() { "]\n" } else { "\n]\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Record> {
        vec![
            Record::new("t").with("n", 3usize).with("x", 0.1).with("ok", true),
            Record::new("t").with("n", 4usize).with("x", f64::INFINITY).with("ok", false),
        ]
    }

    #[test]
    fn csv_layout() {
        let s = render(&sample(), Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "experiment,n,x,ok");
        assert_eq!(lines[1], "t,3,1.0000000000000001e-1,true");
        assert_eq!(lines[2], "t,4,inf,false");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300] {
            assert_eq!(float_text(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_parses_with_flat_objects() {
        let s = render(&sample(), Format::Json);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[0]["n"], 3);
        assert_eq!(arr[1]["x"], "inf");
        assert_eq!(render(&[], Format::Json), "[]\n");
    }

    #[test]
    fn csv_quotes_text_with_commas() {
        let r = Record::new("a,b");
        assert!(render(&[r], Format::Csv).contains("\"a,b\""));
    }
}
