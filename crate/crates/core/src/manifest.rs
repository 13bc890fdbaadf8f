//! Run manifests: what a command read, what it wrote, and under which
//! configuration.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_ms: u128,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: None,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_time_ms = started.elapsed().as_millis();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_json() {
        let mut m = RunManifest::new("analyze");
        m.inputs.push("in.json".into());
        m.outputs.push("out.json".into());
        let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.tool, "symsem");
    }
}
