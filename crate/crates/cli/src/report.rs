use std::time::Instant;

use hyperctrl::hypergraph::{to_json_string, Hypergraph};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the canonical JSON text of `g`.
pub fn digest(g: &Hypergraph) -> String {
    let text = to_json_string(&g.canonical());
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Wall-clock time per named phase.
#[derive(Debug, Default)]
pub struct Timings {
    phases: Map<String, Value>,
}

impl Timings {
    pub fn time<R>(&mut self, phase: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        self.phases.insert(phase.to_string(), Value::from(ms));
        out
    }
}

pub struct RunReport {
    pub command: &'static str,
    pub input_digest: Option<String>,
    pub parameters: Value,
    pub result: Value,
    pub timings: Timings,
}

impl RunReport {
    /// Pretty JSON with keys sorted at every level.
    pub fn render(self) -> String {
        let mut top = Map::new();
        top.insert("command".into(), Value::from(self.command));
        top.insert(
            "input_digest".into(),
            self.input_digest.map_or(Value::Null, Value::from),
        );
        top.insert("parameters".into(), self.parameters);
        top.insert("result".into(), self.result);
        top.insert("timings_ms".into(), Value::Object(self.timings.phases));
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
        text.push('\n');
        text
    }
}
