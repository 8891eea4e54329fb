//! Uniform check records for the verification suites.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One checked inequality or identity: what was measured, against what.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, params: Value, measured: f64, bound: f64, pass: bool) -> Self {
        CheckRecord {
            check: check.into(),
            params,
            seed: None,
            measured,
            bound,
            pass,
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} {} measured={:.6e} bound={:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.params,
            self.measured,
            self.bound
        )?;
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        for note in &self.notes {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

/// Renders records as text lines or as a JSON array.
pub fn render(records: &[CheckRecord], json: bool) -> String {
    if json {
        serde_json::to_string_pretty(records).expect("records serialize")
    } else {
        records.iter().map(|r| format!("{r}\n")).collect()
    }
}
