//! Experiment harness: seeded Monte Carlo sweeps over sampling
//! architectures and recovery algorithms, with deterministic CSV/SVG output.
//!
//! An [`config::ExperimentConfig`] names a signal template, a frontend
//! family, one recovery algorithm, and sweep axes (channel count or total
//! rate, SNR list). Every `(architecture, axis value, snr, trial)` tuple
//! maps to a unique derived seed, so a sweep is a pure function of its
//! config; `elapsed_s` is the only column that varies between runs.

pub mod config;
pub mod metrics;
pub mod report;
pub mod sweep;
pub mod trial;

/// Environment variable controlling the sweep worker-pool size.
pub const WORKERS_ENV: &str = "DAWC_WORKERS";
