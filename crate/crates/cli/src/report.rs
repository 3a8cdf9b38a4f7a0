use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Output;

pub const NON_CONVERGENT: &str = "non-convergent";

/// A JSON number, or the string "non-finite".
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String("non-finite".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub value: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Map<String, Value>>,
    /// Null when the operation has no error estimate.
    pub est_error: Value,
    pub converged: bool,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
}

impl Report {
    pub fn new(command: &'static str, inputs: Value) -> Report {
        Report {
            command,
            inputs,
            value: Value::Null,
            values: Vec::new(),
            est_error: Value::Null,
            converged: true,
            warnings: Vec::new(),
            details: Map::new(),
        }
    }

    pub fn value(mut self, v: f64) -> Report {
        self.value = num(v);
        self
    }

    pub fn est_error(mut self, e: f64) -> Report {
        self.est_error = num(e);
        self
    }

    pub fn detail(mut self, key: &str, v: impl Serialize) -> Report {
        self.details
            .insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn row(&mut self, cells: &[(&str, Value)]) {
        self.values
            .push(cells.iter().map(|(k, v)| (k.to_string(), v.clone())).collect());
    }

    pub fn warn(mut self, w: impl Into<String>) -> Report {
        self.warnings.push(w.into());
        self
    }

    /// Marks the report as failed to converge, keeping the partial value.
    pub fn non_convergent(mut self, partial: f64, terms: usize) -> Report {
        self.value = Value::String(NON_CONVERGENT.into());
        self.est_error = Value::String(NON_CONVERGENT.into());
        self.converged = false;
        self.details.insert("partial".into(), num(partial));
        self.details.insert("terms".into(), Value::from(terms));
        self
    }

    pub fn render(&self, out: Output) -> String {
        match out {
            Output::Json => serde_json::to_string_pretty(self).expect("report serializes"),
            Output::Csv => self.csv(),
        }
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        if let Some(first) = self.values.first() {
            let keys: Vec<&String> = first.keys().collect();
            s += &keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
            s.push('\n');
            for row in &self.values {
                let cells: Vec<String> = keys
                    .iter()
                    .map(|k| row.get(*k).map(cell).unwrap_or_default())
                    .collect();
                s += &cells.join(",");
                s.push('\n');
            }
            return s;
        }
        s += "field,value\n";
        s += &format!("value,{}\n", cell(&self.value));
        s += &format!("est_error,{}\n", cell(&self.est_error));
        s += &format!("converged,{}\n", self.converged);
        for (k, v) in &self.details {
            if matches!(v, Value::Number(_) | Value::Bool(_) | Value::String(_)) {
                s += &format!("{k},{}\n", cell(v));
            }
        }
        s
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
