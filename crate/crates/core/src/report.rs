//! Machine-readable records of a CLI run.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the arguments and the bytes of every input file.
    pub inputs_digest: String,
    pub stages: Vec<Value>,
    pub results: Value,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, digest: String) -> Self {
        RunReport { command: command.into(), inputs_digest: digest, stages: Vec::new(), results: Value::Null, timing_ms: 0.0 }
    }

    /// The report with the timing field removed, for byte-wise comparison.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        if let Value::Object(m) = &mut v {
            m.remove("timing_ms");
        }
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}

#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn arg(&mut self, a: &str) {
        self.0.update((a.len() as u64).to_le_bytes());
        self.0.update(a.as_bytes());
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.0.update((b.len() as u64).to_le_bytes());
        self.0.update(b);
    }

    pub fn finish(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
