//! JSON and CSV rendering.

use std::io::Write;

use serde_json::{Map, Value};

/// Significant digits of every emitted number.
pub const SIG_DIGITS: usize = 12;

pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

/// A JSON number at 12 significant digits, or `"inf"`, `"-inf"`, `"nan"`.
pub fn num(v: f64) -> Value {
    if v.is_nan() {
        Value::from("nan")
    } else if v.is_infinite() {
        Value::from(if v > 0.0 { "inf" } else { "-inf" })
    } else {
        Value::from(round_sig(v))
    }
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

/// Rounds every float in a JSON tree.
pub fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = num(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

/// The result of one subcommand.
pub struct Output {
    /// Full JSON document.
    pub json: Value,
    /// CSV header and rows.
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Human-readable lines for stderr, with 4-digit numbers.
    pub summary: Vec<String>,
}

impl Output {
    pub fn new(command: &str, head: Map<String, Value>) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), Value::from(command));
        json.extend(head);
        Output { json: Value::Object(json), columns: Vec::new(), rows: Vec::new(), summary: Vec::new() }
    }

    pub fn set(&mut self, key: &str, v: Value) {
        if let Value::Object(m) = &mut self.json {
            m.insert(key.to_string(), v);
        }
    }

    /// Sets the CSV table and mirrors it into the JSON under `key` as an
    /// array of objects.
    pub fn table(&mut self, key: &str, columns: Vec<&'static str>, rows: Vec<Vec<Value>>) {
        let objects = rows
            .iter()
            .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect();
        self.set(key, Value::Array(objects));
        self.columns = columns;
        self.rows = rows;
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut json = self.json.clone();
        round_tree(&mut json);
        serde_json::to_writer_pretty(&mut *out, &json)?;
        writeln!(out)
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => round_sig(x).to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// Four significant digits, truncated rather than rounded.
pub fn four(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(3 - mag);
    let t = (v * scale).trunc() / scale;
    let decimals = (3 - mag).max(0) as usize;
    format!("{t:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round_sig(0.345_951_716_354_110_9), 0.345951716354);
        assert_eq!(round_sig(1234567.891234567), 1234567.89123);
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
    }

    #[test]
    fn truncated_four_digits() {
        assert_eq!(four(0.39317972), "0.3931");
        assert_eq!(four(0.34595172), "0.3459");
        assert_eq!(four(0.44464694), "0.4446");
        assert_eq!(four(12.3456), "12.34");
        assert_eq!(four(0.0001234), "0.0001234");
    }
}
