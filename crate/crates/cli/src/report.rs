use serde::Serialize;
use serde_json::Value;

/// Outcome of one command, printed as JSON under `--json`.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub n: Option<usize>,
    pub pairs_checked: Option<usize>,
    pub failures: Vec<String>,
    pub wall_ms: f64,
    pub seed: Option<u64>,
    pub inputs: Value,
    pub result: Value,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        RunReport {
            command,
            n: None,
            pairs_checked: None,
            failures: Vec::new(),
            wall_ms: 0.0,
            seed: None,
            inputs: Value::Null,
            result: Value::Null,
        }
    }
}
