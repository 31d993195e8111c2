//! Report envelopes and output formats shared by the CLI and the FFI layer.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::coloring::Budgets;
use crate::error::{Error, Result};

pub const TOOL: &str = "ewcg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!(
                "unknown format {s:?}, expected json or csv"
            ))),
        }
    }
}

/// Metadata wrapped around every command result.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub spec_hash: Option<String>,
    pub seed: u64,
    pub budgets: Budgets,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(
        command: &str,
        spec_hash: Option<String>,
        seed: u64,
        budgets: Budgets,
        result: T,
    ) -> Self {
        Envelope {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            spec_hash,
            seed,
            budgets,
            result,
        }
    }

    pub fn to_value(&self) -> Result<Value> {
        let mut v = serde_json::to_value(self)?;
        round_entropies(&mut v, false);
        Ok(v)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let v = self.to_value()?;
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&v)? + "\n"),
            Format::Csv => to_csv(&v),
        }
    }
}

fn is_entropy_key(k: &str) -> bool {
    k.contains("entropy") || k.contains("rate") || k == "savings_vs_traditional"
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Rounds every number under an entropy- or rate-named key to 4 decimals.
pub fn round_entropies(v: &mut Value, inside: bool) {
    match v {
        Value::Number(n) if inside => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                if let Some(r) = serde_json::Number::from_f64(round4(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_entropies(x, inside)),
        Value::Object(map) => {
            for (k, x) in map.iter_mut() {
                round_entropies(x, inside || is_entropy_key(k));
            }
        }
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), joined.join(" ")));
        }
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Two-column `field,value` table of a flattened JSON document.
pub fn to_csv(v: &Value) -> Result<String> {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv writer: {e}"));
    w.write_record(["field", "value"]).map_err(io)?;
    for (k, x) in rows {
        w.write_record([k, x]).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv writer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Top-level JSON object with a single `error` entry, used for diagnostics.
pub fn error_value(e: &Error) -> Value {
    let mut m = Map::new();
    m.insert(
        "kind".into(),
        Value::String(format!("{:?}", e.kind()).to_lowercase()),
    );
    m.insert("message".into(), Value::String(e.to_string()));
    m.insert("exit_code".into(), Value::from(e.kind().exit_code()));
    let mut top = Map::new();
    top.insert("error".into(), Value::Object(m));
    Value::Object(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounds_only_entropy_fields() {
        let mut v =
            json!({"entropy": 1.345756, "weights": [0.123456], "rates": {"r": [1.23456, 2.0]}});
        round_entropies(&mut v, false);
        assert_eq!(
            v,
            json!({"entropy": 1.3458, "weights": [0.123456], "rates": {"r": [1.2346, 2.0]}})
        );
    }

    #[test]
    fn csv_quotes_labels() {
        let s = to_csv(&json!({"edges": [{"u": "(-2,-1)", "w": 0.2}], "n": 1})).unwrap();
        assert_eq!(
            s,
            "field,value\nedges.0.u,\"(-2,-1)\"\nedges.0.w,0.2\nn,1\n"
        );
    }

    #[test]
    fn envelope_carries_metadata() {
        let e = Envelope::new(
            "chif",
            Some("ab".into()),
            7,
            Budgets::default(),
            json!({"entropy": 0.123456}),
        );
        let v = e.to_value().unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["result"]["entropy"], 0.1235);
        assert!("xml".parse::<Format>().is_err());
    }
}
