//! Diagnostics reports: a flat list of named metrics plus the config hash.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::io::fmt_f64;

#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsReport {
    pub config_hash: String,
    pub metrics: Vec<Metric>,
    /// `diagnostic: message` for every stage that failed.
    pub failures: Vec<String>,
}

/// JSON number with 17 significant digits; non-finite values become strings.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(v)).expect("formatted float parses"))
    } else {
        Value::String(v.to_string())
    }
}

impl DiagnosticsReport {
    pub fn new(config_hash: String) -> Self {
        DiagnosticsReport { config_hash, ..Default::default() }
    }

    pub fn push(&mut self, name: &str, params: &[(&str, String)], value: f64) {
        let params = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        self.metrics.push(Metric { name: name.into(), params, value });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn find<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Metric> + 'a {
        self.metrics.iter().filter(move |m| m.name == name)
    }

    pub fn to_json(&self) -> Value {
        let metrics: Vec<Value> = self
            .metrics
            .iter()
            .map(|m| {
                let params: Map<String, Value> = m.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                json!({ "name": m.name, "params": params, "value": json_f64(m.value) })
            })
            .collect();
        json!({
            "provenance": { "config_hash": self.config_hash },
            "metrics": metrics,
            "failures": self.failures,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serialises")
    }

    /// SHA-256 of the serialised report.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.to_json_string().as_bytes()))
    }
}
