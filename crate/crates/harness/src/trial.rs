//! Resolving sweep points into concrete frontend configurations and running
//! single seeded trials through the whole pipeline.

use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use dawc_core::frontend::{
    build_signal_matrix, draw_sensing_matrix, measure, overall_rate, Architecture,
    FrontendConfig, NoiseModel,
};
use dawc_core::localization::{
    intervals, nmse_measured, nmse_predicted, reconstruct_with_noise, subband_bounds,
    support_blocks, ChannelNoise, SubbandBounds,
};
use dawc_core::recovery::{solve_by_name, MsspConfig};
use dawc_core::scalar::derive_seed;
use dawc_core::signal::{
    make_random_spec, make_random_spec_with_bandwidths, oracle_support, MultibandSpec,
};
use dawc_core::theory::sparsity_upper_bound;
use dawc_core::Matrix64;

use crate::config::{
    BandwidthAssignment, ExperimentConfig, NmseConfig, SparsitySpec, SweepAxis,
};
use crate::metrics::{
    detection_probability, false_alarm_probability, TrialMetrics, TrialRecord,
};

/// One fully resolved sweep point: no axes left, every derived parameter
/// pinned except the per-trial seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPoint {
    pub architecture: Architecture,
    pub snr_db: Option<f64>,
    /// The sweep coordinate this point came from (channel count or rate).
    pub axis_value: f64,
    pub frontend: FrontendConfig<f64>,
    pub algorithm: String,
    pub solver: MsspConfig<f64>,
}

fn integral_intervals(f_nyq: f64, step: f64, what: &str) -> Result<usize> {
    let l = f_nyq / step;
    let rounded = l.round();
    if (l - rounded).abs() > 1e-9 * l.max(1.0) || rounded < 1.0 {
        bail!("{what}: f_nyq / {step} = {l} is not a positive integer");
    }
    Ok(rounded as usize)
}

/// Expand a config into the Cartesian product of its sweep axes.
pub fn resolve_points(cfg: &ExperimentConfig) -> Result<Vec<ResolvedPoint>> {
    cfg.validate()?;
    let f_nyq = 2.0 * cfg.signal.f_max_hz;
    let nominal = cfg.nominal_bandwidths();
    let nominal_b_total: f64 = nominal.iter().sum();
    let axis_values: Vec<f64> = match &cfg.sweep.axis {
        SweepAxis::Channels(v) => v.iter().map(|&p| p as f64).collect(),
        SweepAxis::TotalRateHz(v) => v.clone(),
    };
    let mut points = Vec::new();
    for &arch in &cfg.frontend.architectures {
        let template = match arch {
            Architecture::Dawc => {
                let p = cfg
                    .frontend
                    .dawc
                    .ok_or_else(|| anyhow!("dawc parameters missing"))?;
                let intervals = integral_intervals(f_nyq, p.f_p_hz, "dawc")?;
                FrontendConfig {
                    architecture: arch,
                    f_p_hz: p.f_p_hz,
                    f_c_hz: p.f_c_hz,
                    f_s_hz: p.f_s_hz,
                    segments_per_interval: p.segments_per_interval,
                    channels: 0,
                    intervals,
                    snapshots: cfg.frontend.snapshots,
                    samples_per_snapshot: 0,
                    seed: 0,
                }
            }
            _ => {
                let p = cfg
                    .frontend
                    .csss
                    .ok_or_else(|| anyhow!("csss parameters missing"))?;
                let intervals = integral_intervals(f_nyq, p.f_s_hz, "csss")?;
                FrontendConfig {
                    architecture: arch,
                    f_p_hz: p.f_s_hz,
                    f_c_hz: p.f_s_hz,
                    f_s_hz: p.f_s_hz,
                    segments_per_interval: 1,
                    channels: 0,
                    intervals,
                    snapshots: cfg.frontend.snapshots,
                    samples_per_snapshot: 0,
                    seed: 0,
                }
            }
        };
        // N = ceil(T f_s / r): the grid slightly oversamples when T f_s does
        // not factor as r N
        let samples = (cfg.signal.window_s * template.f_s_hz / cfg.frontend.snapshots as f64)
            .ceil() as usize;
        if samples == 0 || cfg.frontend.snapshots * samples < 2 {
            bail!("window too short: T f_s = {}", cfg.signal.window_s * template.f_s_hz);
        }
        let sparsity = match cfg.algorithm.sparsity {
            SparsitySpec::Fixed(s) => s,
            SparsitySpec::Auto(_) => match arch {
                Architecture::Dawc => sparsity_upper_bound(&nominal, &template).1,
                _ => nominal
                    .iter()
                    .map(|&b| (b / template.f_s_hz).ceil() as usize + 1)
                    .sum(),
            },
        };
        for &axis_value in &axis_values {
            let channels = match &cfg.sweep.axis {
                SweepAxis::Channels(_) => axis_value as usize,
                SweepAxis::TotalRateHz(_) => {
                    let stage1_budget = match arch {
                        Architecture::Dawc => {
                            // reserve the worst-case reconstruction rate
                            axis_value
                                - (nominal_b_total
                                    + 2.0 * cfg.signal.n_sig as f64 * template.f_c_hz)
                        }
                        _ => axis_value,
                    };
                    let p = (stage1_budget / template.f_s_hz + 1e-9).floor();
                    if p < 1.0 {
                        bail!(
                            "rate budget {axis_value} Hz leaves no room for sensing channels \
                             on {arch:?}"
                        );
                    }
                    p as usize
                }
            };
            let mut frontend = template.clone();
            frontend.channels = channels;
            frontend.samples_per_snapshot = samples;
            points.push(ResolvedPoint {
                architecture: arch,
                snr_db: None,
                axis_value,
                frontend,
                algorithm: cfg.algorithm.name.clone(),
                solver: MsspConfig {
                    sparsity,
                    omega: cfg.algorithm.omega,
                    residual_tolerance: cfg.algorithm.residual_tolerance,
                    max_iterations: cfg.algorithm.max_iterations,
                },
            });
        }
    }
    // snr is the innermost axis
    let mut expanded = Vec::with_capacity(points.len() * cfg.sweep.snr_db.len());
    for point in points {
        for &snr in &cfg.sweep.snr_db {
            let mut p = point.clone();
            p.snr_db = snr;
            expanded.push(p);
        }
    }
    Ok(expanded)
}

fn draw_spec(cfg: &ExperimentConfig, seed: u64) -> Result<MultibandSpec<f64>> {
    let spec = match cfg.signal.bandwidth_assignment {
        BandwidthAssignment::Draw => make_random_spec(
            cfg.signal.n_sig,
            &cfg.signal.bandwidth_pool_hz,
            cfg.signal.f_max_hz,
            cfg.signal.window_s,
            seed,
        )?,
        BandwidthAssignment::Cycle => {
            let bandwidths = cfg.nominal_bandwidths();
            make_random_spec_with_bandwidths(
                &bandwidths,
                cfg.signal.f_max_hz,
                cfg.signal.window_s,
                seed,
            )?
        }
    };
    Ok(spec)
}

fn evaluate_nmse(
    spec: &MultibandSpec<f64>,
    bounds: &SubbandBounds<f64>,
    nmse_cfg: &NmseConfig,
    f_nyq: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    let b_min = spec
        .subbands
        .iter()
        .map(|s| s.bandwidth_hz)
        .fold(f64::INFINITY, f64::min);
    let eval_samples =
        ((nmse_cfg.samples_per_inv_min_bandwidth * spec.window_s * b_min).ceil() as usize).max(2);
    let noise = match nmse_cfg.snr_f {
        Some(snr_f) => ChannelNoise::SnrF(snr_f),
        None => ChannelNoise::Noiseless,
    };
    let wave = reconstruct_with_noise(spec, bounds, spec.window_s, eval_samples, noise, seed)?;
    let dt = spec.window_s / (eval_samples - 1) as f64;
    let reference: Vec<_> = (0..eval_samples)
        .map(|m| spec.time_signal_at(m as f64 * dt))
        .collect();
    let measured = nmse_measured(&wave.samples, &reference)?;

    let truth = intervals::normalize(spec.intervals());
    let estimated = intervals::normalize(bounds.ranges());
    let b_total = intervals::measure(&truth);
    let detected = intervals::measure(&intervals::intersect(&estimated, &truth));
    let false_band = intervals::measure(&intervals::subtract(&estimated, &truth));
    let rho_d = detected / b_total;
    let rho_f = false_band / (f_nyq - b_total);
    let snr_f = nmse_cfg.snr_f.unwrap_or(f64::INFINITY);
    let predicted = nmse_predicted(rho_d, rho_f, snr_f, f_nyq, b_total);
    Ok((measured, predicted))
}

/// Run one seeded trial at a resolved point: draw the signal, measure it
/// through the architecture, recover the support, localize, and score.
pub fn run_trial(
    cfg: &ExperimentConfig,
    point: &ResolvedPoint,
    trial_index: usize,
    trial_seed: u64,
) -> TrialRecord {
    let started = Instant::now();
    match run_trial_inner(cfg, point, trial_seed) {
        Ok(mut metrics) => {
            metrics.elapsed_s = started.elapsed().as_secs_f64();
            TrialRecord { trial_index, seed: trial_seed, metrics: Some(metrics), error: None }
        }
        Err(e) => TrialRecord {
            trial_index,
            seed: trial_seed,
            metrics: None,
            error: Some(e.to_string()),
        },
    }
}

fn run_trial_inner(
    cfg: &ExperimentConfig,
    point: &ResolvedPoint,
    trial_seed: u64,
) -> Result<TrialMetrics> {
    let spec_seed = derive_seed(trial_seed, &[1]);
    let matrix_seed = derive_seed(trial_seed, &[2]);
    let noise_seed = derive_seed(trial_seed, &[3]);
    let recon_seed = derive_seed(trial_seed, &[4]);

    let spec = draw_spec(cfg, spec_seed)?;
    let mut frontend = point.frontend.clone();
    frontend.seed = matrix_seed;

    let x = build_signal_matrix(&spec, &frontend)?;
    let a = draw_sensing_matrix(&frontend)?;
    let noise = match point.snr_db {
        Some(snr) => NoiseModel::SnrDb(snr),
        None => NoiseModel::Noiseless,
    };
    let set = measure(&a, &x, noise, noise_seed)?;

    // MSSP consumes the snapshot blocks; baselines see one MMV problem
    let blocks: Vec<Matrix64> = if point.algorithm == "mssp" {
        let n = frontend.samples_per_snapshot;
        (0..frontend.snapshots)
            .map(|i| set.y.columns(i * n, n).into_owned())
            .collect()
    } else {
        vec![set.y.clone()]
    };
    let out = solve_by_name(&point.algorithm, &a, &blocks, &point.solver)?;

    let truth = oracle_support(&spec, &frontend);
    let estimate = out.union_support();
    let pd = detection_probability(&truth, &estimate);
    let pf = false_alarm_probability(&truth, &estimate, frontend.rows());

    let bounds = subband_bounds(&support_blocks(&estimate), &frontend)?;
    let rate = match point.architecture {
        Architecture::Dawc => overall_rate(&frontend, Some(&bounds.ranges())),
        _ => overall_rate(&frontend, None),
    };

    let (nmse_meas, nmse_pred) = if cfg.nmse.enabled {
        let (m, p) = evaluate_nmse(&spec, &bounds, &cfg.nmse, spec.f_nyq_hz(), recon_seed)?;
        (Some(m), Some(p))
    } else {
        (None, None)
    };

    Ok(TrialMetrics {
        pd,
        pf,
        nmse_measured: nmse_meas,
        nmse_predicted: nmse_pred,
        overall_rate_hz: rate,
        true_support_size: truth.len(),
        estimated_support_size: estimate.len(),
        converged: out.converged,
        iterations: out.iterations_used,
        elapsed_s: 0.0,
    })
}

/// Seed for `(point index, trial index)` under a base seed.
pub fn trial_seed(base_seed: u64, point_index: usize, trial_index: usize) -> u64 {
    derive_seed(base_seed, &[point_index as u64, trial_index as u64])
}
