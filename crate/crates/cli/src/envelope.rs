use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "tbg-magic";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub potential_digest: String,
    pub command: Vec<String>,
    pub elapsed_ms: u128,
    pub payload: Value,
}

impl Envelope {
    pub fn new(digest: &str, command: Vec<String>, elapsed_ms: u128, payload: Value) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            potential_digest: digest.into(),
            command,
            elapsed_ms,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}
