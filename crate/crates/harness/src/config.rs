//! Experiment configuration: JSON schema with explicit units in the field
//! names, loaded with field-path diagnostics.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dawc_core::frontend::Architecture;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal: SignalTemplate,
    pub frontend: FrontendTemplate,
    pub algorithm: AlgorithmConfig,
    pub sweep: SweepAxes,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub nmse: NmseConfig,
    /// Optional acceptance thresholds checked by `sweep --assert`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalTemplate {
    pub n_sig: usize,
    pub bandwidth_pool_hz: Vec<f64>,
    /// How pool entries map to subbands: drawn uniformly per subband, or
    /// cycled `pool[i mod len]` for a fixed bandwidth multiset.
    #[serde(default)]
    pub bandwidth_assignment: BandwidthAssignment,
    pub f_max_hz: f64,
    pub window_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandwidthAssignment {
    #[default]
    Draw,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontendTemplate {
    pub architectures: Vec<Architecture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dawc: Option<DawcParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csss: Option<CsssParams>,
    /// Column blocks `r` the measurement is split into.
    pub snapshots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DawcParams {
    pub f_p_hz: f64,
    pub f_c_hz: f64,
    pub f_s_hz: f64,
    pub segments_per_interval: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsssParams {
    pub f_s_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    /// One of "mssp", "somp", "sp", "ssmp", "mp".
    pub name: String,
    #[serde(default = "default_omega")]
    pub omega: f64,
    pub sparsity: SparsitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

fn default_omega() -> f64 {
    0.9
}

/// Either a fixed sparsity or "auto", the worst-case bound implied by the
/// signal template and the architecture's grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SparsitySpec {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoTag {
    #[serde(rename = "auto")]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(flatten)]
    pub axis: SweepAxis,
    /// SNR points in dB; `null` entries mean noiseless.
    pub snr_db: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Sweep the number of sensing channels directly.
    #[serde(rename = "channels")]
    Channels(Vec<usize>),
    /// Sweep the overall rate budget; the channel count is derived per
    /// architecture (for the DAWC the reconstruction-stage budget
    /// `B + 2 N_sig f_c` is reserved first).
    #[serde(rename = "total_rate_hz")]
    TotalRateHz(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmseConfig {
    pub enabled: bool,
    /// Per-frequency SNR of the reconstruction channels; absent means
    /// noiseless channels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_f: Option<f64>,
    /// Evaluation-grid density: samples per `1 / B_min`.
    #[serde(default = "default_eval_density")]
    pub samples_per_inv_min_bandwidth: f64,
}

fn default_eval_density() -> f64 {
    8.0
}

impl Default for NmseConfig {
    fn default() -> Self {
        Self { enabled: false, snr_f: None, samples_per_inv_min_bandwidth: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_mean_pd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mean_pf: Option<f64>,
}

impl ExperimentConfig {
    /// Semantic checks on top of the schema.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.signal.n_sig == 0 {
            bail!("signal.n_sig must be at least 1");
        }
        if self.signal.bandwidth_pool_hz.is_empty() {
            bail!("signal.bandwidth_pool_hz must be nonempty");
        }
        if self.frontend.architectures.is_empty() {
            bail!("frontend.architectures must be nonempty");
        }
        if self.frontend.snapshots == 0 {
            bail!("frontend.snapshots must be at least 1");
        }
        let needs_dawc = self.frontend.architectures.contains(&Architecture::Dawc);
        if needs_dawc && self.frontend.dawc.is_none() {
            bail!("frontend.dawc parameters are required for the dawc architecture");
        }
        let needs_csss = self
            .frontend
            .architectures
            .iter()
            .any(|a| a.is_csss());
        if needs_csss && self.frontend.csss.is_none() {
            bail!("frontend.csss parameters are required for mwc/mcs architectures");
        }
        if !dawc_core::recovery::ALGORITHM_NAMES.contains(&self.algorithm.name.as_str()) {
            bail!(
                "unknown algorithm {:?}; expected one of {:?}",
                self.algorithm.name,
                dawc_core::recovery::ALGORITHM_NAMES
            );
        }
        let empty_axis = match &self.sweep.axis {
            SweepAxis::Channels(v) => v.is_empty(),
            SweepAxis::TotalRateHz(v) => v.is_empty(),
        };
        if empty_axis || self.sweep.snr_db.is_empty() {
            bail!("sweep axes must be nonempty");
        }
        if self.nmse.enabled {
            if let Some(snr_f) = self.nmse.snr_f {
                if !(snr_f > 0.0) {
                    bail!("nmse.snr_f must be positive");
                }
            }
        }
        Ok(())
    }

    /// The bandwidth multiset the sparsity bound and rate budget are sized
    /// for: the cycled pool, or the worst pool entry per subband when drawn.
    pub fn nominal_bandwidths(&self) -> Vec<f64> {
        let pool = &self.signal.bandwidth_pool_hz;
        match self.signal.bandwidth_assignment {
            BandwidthAssignment::Cycle => (0..self.signal.n_sig)
                .map(|i| pool[i % pool.len()])
                .collect(),
            BandwidthAssignment::Draw => {
                let worst = pool.iter().copied().fold(0.0f64, f64::max);
                vec![worst; self.signal.n_sig]
            }
        }
    }
}

/// Load a config file, reporting the JSON path of whatever field failed.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| anyhow::anyhow!("{}: at {}: {}", path.display(), e.path(), e.inner()))?;
    cfg.validate()?;
    Ok(cfg)
}
