//! Probe report records, serialized as JSON by the CLI.

use serde::Serialize;

/// Outcome of a Monte Carlo probe: a point estimate with a 95% confidence
/// interval, the trial count, and probe-specific parameters/extras.
///
/// Binomial probes fill `successes` and use a Wilson interval, which always
/// contains the point estimate; continuous estimates use a normal interval
/// on the mean.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub successes: Option<u64>,
    pub seed: u64,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
    /// Statistics caveats, e.g. an underpowered trial count.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ProbeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("probe reports contain only finite numbers")
    }

    pub fn ci_contains_estimate(&self) -> bool {
        self.ci_low <= self.estimate && self.estimate <= self.ci_high
    }

    /// Flag the report when fewer than `min` trials back the estimate.
    pub fn warn_if_underpowered(mut self, min: u64) -> Self {
        if self.trials < min {
            self.warnings.push(format!(
                "only {} trials (< {min}); interval may be unreliable",
                self.trials
            ));
        }
        self
    }
}
