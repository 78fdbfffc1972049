use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Errors that end a run before its checks complete.
#[derive(Debug)]
pub enum CliError {
    Usage { message: String },
    Internal { message: String, witness: Value },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage { message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Internal { .. } => EXIT_INTERNAL,
        }
    }

    pub fn record(&self, command: &str) -> WitnessRecord {
        match self {
            CliError::Usage { message } => {
                WitnessRecord { command: command.into(), exit_code: EXIT_USAGE, kind: "usage".into(), failures: vec![json!({ "message": message })] }
            }
            CliError::Internal { message, witness } => WitnessRecord {
                command: command.into(),
                exit_code: EXIT_INTERNAL,
                kind: "internal".into(),
                failures: vec![json!({ "message": message, "witness": witness })],
            },
        }
    }
}

impl From<eulerci_core::Error> for CliError {
    fn from(e: eulerci_core::Error) -> Self {
        use eulerci_core::Error;
        let witness = match &e {
            Error::HardFailure { witness, .. } => serde_json::to_value(witness).unwrap_or(Value::Null),
            Error::Midpoint { index, denominator, source } => match source.as_ref() {
                Error::HardFailure { witness, .. } => json!({ "index": index, "denominator": denominator, "node": witness }),
                _ => json!({ "index": index, "denominator": denominator }),
            },
            _ => Value::Null,
        };
        CliError::Internal { message: e.to_string(), witness }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal { message: format!("io: {e}"), witness: Value::Null }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal { message: format!("csv: {e}"), witness: Value::Null }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal { message: format!("json: {e}"), witness: Value::Null }
    }
}

/// Machine-readable record attached to every nonzero exit.
#[derive(Debug, Serialize)]
pub struct WitnessRecord {
    pub command: String,
    pub exit_code: i32,
    pub kind: String,
    pub failures: Vec<Value>,
}

impl WitnessRecord {
    /// One JSON line on stderr, plus `witness.json` when the output directory exists.
    pub fn emit(&self, out: Option<&Path>) {
        let line = serde_json::to_string(self).expect("witness serializes");
        eprintln!("{line}");
        if let Some(dir) = out.filter(|d| d.is_dir()) {
            let _ = std::fs::write(dir.join("witness.json"), format!("{line}\n"));
        }
    }
}

/// FNV-1a over the canonical JSON of a check's parameters.
pub fn params_hash(params: &Value) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in params.to_string().bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Whether a check bounds its value from above or below.
#[derive(Debug, Clone, Copy)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub op: String,
    pub params: Value,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub witness: Option<Value>,
}

impl CheckRow {
    pub fn new(op: &str, params: Value, value: f64, tolerance: f64, bound: Bound) -> Self {
        CheckRow { op: op.into(), params, value, tolerance, bound, witness: None }
    }

    pub fn with_witness(mut self, w: Option<Value>) -> Self {
        self.witness = w;
        self
    }

    /// Signed slack; NaN values never pass.
    pub fn margin(&self) -> f64 {
        match self.bound {
            Bound::AtMost => self.tolerance - self.value,
            Bound::AtLeast => self.value - self.tolerance,
        }
    }

    pub fn pass(&self) -> bool {
        self.margin() >= 0.0
    }

    fn failure(&self) -> Value {
        json!({
            "op": self.op,
            "params": self.params,
            "value": self.value,
            "tolerance": self.tolerance,
            "margin": self.margin(),
            "witness": self.witness,
        })
    }
}

/// Shortest round-trip scientific form, so equal values print identically.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Writes the check table and returns the failures as witness entries.
pub fn write_checks(path: &Path, rows: &[CheckRow]) -> Result<Vec<Value>, CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["op", "params_hash", "value", "margin", "tolerance", "pass", "witness"])?;
    for r in rows {
        let witness = if r.pass() { String::new() } else { r.witness.as_ref().map(|v| v.to_string()).unwrap_or_default() };
        w.write_record([
            r.op.clone(),
            params_hash(&r.params),
            num(r.value),
            num(r.margin()),
            num(r.tolerance),
            r.pass().to_string(),
            witness,
        ])?;
    }
    w.flush()?;
    Ok(rows.iter().filter(|r| !r.pass()).map(CheckRow::failure).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_failures_map_to_internal_exit() {
        let e: CliError = eulerci_core::Error::HardFailure { detail: "forced".into(), witness: None }.into();
        assert_eq!(e.exit_code(), EXIT_INTERNAL);
        let r = e.record("run-engine");
        assert_eq!(r.kind, "internal");
        assert_eq!(r.exit_code, EXIT_INTERNAL);
        assert!(r.failures[0]["message"].as_str().unwrap().contains("forced"));

        let nested = eulerci_core::Error::Midpoint {
            index: 1,
            denominator: 2,
            source: Box::new(eulerci_core::Error::HardFailure { detail: "x".into(), witness: None }),
        };
        let e: CliError = nested.into();
        assert_eq!(e.record("build-path").failures[0]["witness"]["index"], 1);
        assert_eq!(CliError::usage("u").exit_code(), EXIT_USAGE);
    }

    #[test]
    fn margins_and_nan() {
        let at_most = CheckRow::new("a", json!({}), 0.5, 1.0, Bound::AtMost);
        assert_eq!(at_most.margin(), 0.5);
        assert!(at_most.pass());
        let at_least = CheckRow::new("b", json!({}), 0.5, 1.0, Bound::AtLeast);
        assert!(!at_least.pass());
        assert!(!CheckRow::new("c", json!({}), f64::NAN, 1.0, Bound::AtMost).pass());
    }

    #[test]
    fn params_hash_is_stable() {
        assert_eq!(params_hash(&json!({"a": 1})), params_hash(&json!({"a": 1})));
        assert_ne!(params_hash(&json!({"a": 1})), params_hash(&json!({"a": 2})));
        assert_eq!(num(0.1), "1e-1");
    }
}
