//! JSON report assembly.

use kzdk_core::superlinalg::{CMat, CVec, C64, BRANCH_CONVENTION};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Row-major `[re, im]` pairs.
pub fn matrix(m: &CMat) -> Value {
    let data: Vec<Value> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| complex(m[(i, j)]))
        .collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

pub fn vector(v: &CVec) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub params: Value,
}

impl Check {
    /// Passes when `residual < tolerance`.
    pub fn below(label: impl Into<String>, residual: f64, tolerance: f64, params: Value) -> Self {
        Check {
            label: label.into(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
            params,
        }
    }

    /// A yes/no outcome; the residual is 0 or 1.
    pub fn flag(label: impl Into<String>, passed: bool, params: Value) -> Self {
        Check {
            label: label.into(),
            residual: if passed { 0.0 } else { 1.0 },
            tolerance: 0.5,
            passed,
            params,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    pub matrices: Map<String, Value>,
    pub provenance: Map<String, Value>,
    pub timings: Option<Map<String, Value>>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        let mut provenance = Map::new();
        provenance.insert("branch".into(), json!(BRANCH_CONVENTION));
        provenance.insert("signRule".into(), json!("Koszul"));
        Report {
            command: command.into(),
            config,
            checks: Vec::new(),
            data: Map::new(),
            matrices: Map::new(),
            provenance,
            timings: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.provenance.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn to_json(&self, emit_matrices: bool) -> Value {
        let mut out = json!({
            "schemaVersion": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "passed": self.passed(),
            "checks": self.checks,
            "data": self.data,
            "provenance": self.provenance,
        });
        if emit_matrices {
            out["matrices"] = Value::Object(self.matrices.clone());
        }
        if let Some(t) = &self.timings {
            out["timings"] = Value::Object(t.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kzdk_core::superlinalg::c;

    #[test]
    fn row_major_pairs() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(4.0, 5.0)]);
        let v = matrix(&m);
        assert_eq!(v["data"][1], json!([3.0, 0.0]));
        assert_eq!(v["data"][2], json!([0.0, -1.0]));
    }
}
