//! Reproducible run reports: input digests, parameters and results with
//! 9-significant-digit numeric output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// A machine-readable record of one CLI invocation. Identical inputs and
/// flags reproduce every field except `wall_ms` bit-identically.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    /// Content hash (SHA-256 hex) per input file.
    pub inputs: BTreeMap<String, String>,
    /// Parameter values as strings, sorted by name.
    pub params: BTreeMap<String, String>,
    /// Named numeric results, rounded to 9 significant digits.
    pub results: BTreeMap<String, serde_json::Value>,
    pub wall_ms: u64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            inputs: BTreeMap::new(),
            params: BTreeMap::new(),
            results: BTreeMap::new(),
            wall_ms: 0,
        }
    }

    pub fn add_input(&mut self, name: &str, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.inputs.insert(name.into(), hex_digest(&hasher.finalize()));
        Ok(())
    }

    pub fn add_param(&mut self, name: &str, value: impl ToString) {
        self.params.insert(name.into(), value.to_string());
    }

    pub fn add_result(&mut self, name: &str, value: f64) {
        self.results
            .insert(name.into(), serde_json::json!(sig9(value)));
    }

    pub fn add_result_text(&mut self, name: &str, value: &str) {
        self.results.insert(name.into(), serde_json::json!(value));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Round to 9 significant digits through the decimal representation, so
/// printed values are stable under tolerance-based golden comparisons.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("9-digit rounding parses")
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_rounds_to_nine_digits() {
        assert_eq!(sig9(1.0 / 3.0), 0.333333333);
        assert_eq!(sig9(4.0 - 8.0 / std::f64::consts::PI), 1.45352091);
        assert_eq!(sig9(0.0), 0.0);
        assert_eq!(sig9(1.0), 1.0);
        assert_eq!(sig9(-12345.6789012), -12345.6789);
    }

    #[test]
    fn report_json_is_deterministic() {
        let mut a = RunReport::new("metrics");
        a.add_param("labels", "1,2");
        a.add_result("dice_1", 0.5);
        let mut b = RunReport::new("metrics");
        b.add_param("labels", "1,2");
        b.add_result("dice_1", 0.5);
        assert_eq!(a.to_json(), b.to_json());
    }
}
