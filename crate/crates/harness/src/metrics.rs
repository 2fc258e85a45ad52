//! Detection metrics and the per-trial record.

use dawc_core::SupportSet;
use serde::{Deserialize, Serialize};

/// Detection probability `|T and S| / |T|`.
pub fn detection_probability(truth: &SupportSet, estimate: &SupportSet) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    truth.intersection(estimate).count() as f64 / truth.len() as f64
}

/// False-alarm probability `|S \ T| / (D - |T|)`. Panics if `D <= |T|`
/// (the denominator must be positive for the metric to exist).
pub fn false_alarm_probability(truth: &SupportSet, estimate: &SupportSet, rows: usize) -> f64 {
    assert!(rows > truth.len(), "false-alarm denominator must be positive");
    estimate.difference(truth).count() as f64 / (rows - truth.len()) as f64
}

/// Everything measured in one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub pd: f64,
    pub pf: f64,
    pub nmse_measured: Option<f64>,
    pub nmse_predicted: Option<f64>,
    pub overall_rate_hz: f64,
    pub true_support_size: usize,
    pub estimated_support_size: usize,
    pub converged: bool,
    pub iterations: usize,
    pub elapsed_s: f64,
}

/// Outcome of one trial: either metrics or a recorded failure. Failures
/// never abort a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub seed: u64,
    pub metrics: Option<TrialMetrics>,
    pub error: Option<String>,
}
