use std::fmt;

use liggett_lab::colorlab::ColorError;
use liggett_lab::gaplab::GapError;
use liggett_lab::ipslab::SimError;
use serde_json::{Map, Value};

/// Failure of a run. Usage errors exit with 2, failed `--expect` checks with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<ColorError> for CliError {
    fn from(e: ColorError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GapError> for CliError {
    fn from(e: GapError) -> Self {
        match e {
            GapError::Io(m) => CliError::Io(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Outcome of one subcommand: the resolved inputs, the result fields, a
/// human-readable rendering and, if an `--expect` check failed, why.
pub struct Report {
    pub op: &'static str,
    pub inputs: Map<String, Value>,
    pub result: Map<String, Value>,
    pub text: String,
    pub failed_check: Option<String>,
}

impl Report {
    pub fn new(op: &'static str) -> Self {
        Self { op, inputs: Map::new(), result: Map::new(), text: String::new(), failed_check: None }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) {
        self.result.insert(key.to_string(), value.into());
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.text.push_str(text.as_ref());
        self.text.push('\n');
    }

    pub fn expect(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok && self.failed_check.is_none() {
            self.failed_check = Some(message());
        }
    }

    pub fn to_json(&self, elapsed_ms: u128) -> Value {
        let mut out = Map::new();
        out.insert("op".into(), Value::from(self.op));
        out.insert("inputs".into(), Value::Object(self.inputs.clone()));
        for (k, v) in &self.result {
            out.insert(k.clone(), v.clone());
        }
        if let Some(msg) = &self.failed_check {
            out.insert("checkFailed".into(), Value::from(msg.as_str()));
        }
        out.insert("elapsedMs".into(), Value::from(elapsed_ms as u64));
        Value::Object(out)
    }
}

/// Rebuilds an argument vector from a report's `op` and `inputs`: every input
/// key is the long flag of the same name.
pub fn argv_from_report(report: &Value) -> Result<Vec<String>, CliError> {
    let bad = |m: &str| CliError::Usage(format!("not a report: {m}"));
    let op = report.get("op").and_then(Value::as_str).ok_or_else(|| bad("missing op"))?;
    let inputs = report.get("inputs").and_then(Value::as_object).ok_or_else(|| bad("missing inputs"))?;
    let mut argv = vec!["liggett-lab".to_string()];
    argv.extend(op.split_whitespace().map(str::to_string));
    for (key, value) in inputs {
        let flag = format!("--{key}");
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => argv.push(flag),
            Value::String(s) => argv.extend([flag, s.clone()]),
            Value::Number(n) => argv.extend([flag, n.to_string()]),
            Value::Array(items) => {
                let joined: Vec<String> = items
                    .iter()
                    .map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()))
                    .collect();
                argv.extend([flag, joined.join(",")]);
            }
            Value::Object(_) => return Err(bad("nested input")),
        }
    }
    Ok(argv)
}

/// Report with the fields that legitimately vary between runs removed.
pub fn comparable(report: &Value) -> Value {
    let mut v = report.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("elapsedMs");
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn argv_round_trip() {
        let r = json!({"op": "sim duality", "inputs": {"cycle": 10, "set": [0, 1], "rho": 0.5, "graph": null}});
        let argv = argv_from_report(&r).unwrap();
        assert_eq!(argv, ["liggett-lab", "sim", "duality", "--cycle", "10", "--rho", "0.5", "--set", "0,1"]);
        assert!(argv_from_report(&json!({"inputs": {}})).is_err());
    }
}
