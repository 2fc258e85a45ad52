//! Sweep execution: Cartesian product of the configured axes, trials
//! distributed over a worker pool, order-independent aggregation, and
//! incremental CSV flushing so partial results survive an interruption.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, SweepAxis};
use crate::metrics::TrialRecord;
use crate::report::{fmt_f64, fmt_opt, svg_line_plot, write_svg, Series};
use crate::trial::{resolve_points, run_trial, trial_seed, ResolvedPoint};
use crate::WORKERS_ENV;

/// Aggregated results at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub architecture: String,
    pub algorithm: String,
    pub snr_db: Option<f64>,
    pub axis_kind: String,
    pub axis_value: f64,
    pub channels: usize,
    pub sparsity: usize,
    pub trials: usize,
    pub failed: usize,
    pub converged: usize,
    pub mean_pd: f64,
    pub mean_pf: f64,
    pub mean_nmse_measured: Option<f64>,
    pub mean_nmse_predicted: Option<f64>,
    pub mean_overall_rate_hz: f64,
    pub mean_iterations: f64,
    pub mean_elapsed_s: f64,
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub records: Vec<(usize, Vec<TrialRecord>)>,
}

pub const SWEEP_CSV_HEADER: &str = "architecture,algorithm,snr_db,axis_kind,axis_value,channels,\
sparsity,trials,failed,converged,mean_pd,mean_pf,mean_nmse_measured,mean_nmse_predicted,\
mean_overall_rate_hz,mean_iterations,mean_elapsed_s";

pub const TRIALS_CSV_HEADER: &str = "point_index,architecture,algorithm,snr_db,axis_value,\
channels,trial_index,seed,pd,pf,nmse_measured,nmse_predicted,overall_rate_hz,\
true_support_size,estimated_support_size,converged,iterations,error,elapsed_s";

fn arch_name(p: &ResolvedPoint) -> String {
    format!("{:?}", p.architecture).to_lowercase()
}

fn snr_field(snr: Option<f64>) -> String {
    snr.map(fmt_f64).unwrap_or_else(|| "noiseless".into())
}

fn aggregate(cfg: &ExperimentConfig, point: &ResolvedPoint, records: &[TrialRecord]) -> SweepRow {
    let ok: Vec<_> = records.iter().filter_map(|r| r.metrics.as_ref()).collect();
    let n = ok.len().max(1) as f64;
    let mean = |f: &dyn Fn(&crate::metrics::TrialMetrics) -> f64| {
        ok.iter().map(|m| f(m)).sum::<f64>() / n
    };
    let mean_opt = |f: &dyn Fn(&crate::metrics::TrialMetrics) -> Option<f64>| {
        let vals: Vec<f64> = ok.iter().filter_map(|m| f(m)).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    };
    SweepRow {
        architecture: arch_name(point),
        algorithm: point.algorithm.clone(),
        snr_db: point.snr_db,
        axis_kind: match cfg.sweep.axis {
            SweepAxis::Channels(_) => "channels".into(),
            SweepAxis::TotalRateHz(_) => "total_rate_hz".into(),
        },
        axis_value: point.axis_value,
        channels: point.frontend.channels,
        sparsity: point.solver.sparsity,
        trials: records.len(),
        failed: records.iter().filter(|r| r.error.is_some()).count(),
        converged: ok.iter().filter(|m| m.converged).count(),
        mean_pd: mean(&|m| m.pd),
        mean_pf: mean(&|m| m.pf),
        mean_nmse_measured: mean_opt(&|m| m.nmse_measured),
        mean_nmse_predicted: mean_opt(&|m| m.nmse_predicted),
        mean_overall_rate_hz: mean(&|m| m.overall_rate_hz),
        mean_iterations: mean(&|m| m.iterations as f64),
        mean_elapsed_s: mean(&|m| m.elapsed_s),
    }
}

pub fn sweep_row_csv(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.architecture,
        row.algorithm,
        snr_field(row.snr_db),
        row.axis_kind,
        fmt_f64(row.axis_value),
        row.channels,
        row.sparsity,
        row.trials,
        row.failed,
        row.converged,
        fmt_f64(row.mean_pd),
        fmt_f64(row.mean_pf),
        fmt_opt(row.mean_nmse_measured),
        fmt_opt(row.mean_nmse_predicted),
        fmt_f64(row.mean_overall_rate_hz),
        fmt_f64(row.mean_iterations),
        fmt_f64(row.mean_elapsed_s),
    )
}

fn trial_row_csv(point_index: usize, point: &ResolvedPoint, r: &TrialRecord) -> String {
    let m = r.metrics.as_ref();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        point_index,
        arch_name(point),
        point.algorithm,
        snr_field(point.snr_db),
        fmt_f64(point.axis_value),
        point.frontend.channels,
        r.trial_index,
        r.seed,
        fmt_opt(m.map(|m| m.pd)),
        fmt_opt(m.map(|m| m.pf)),
        fmt_opt(m.and_then(|m| m.nmse_measured)),
        fmt_opt(m.and_then(|m| m.nmse_predicted)),
        fmt_opt(m.map(|m| m.overall_rate_hz)),
        m.map(|m| m.true_support_size.to_string()).unwrap_or_default(),
        m.map(|m| m.estimated_support_size.to_string()).unwrap_or_default(),
        m.map(|m| m.converged.to_string()).unwrap_or_default(),
        m.map(|m| m.iterations.to_string()).unwrap_or_default(),
        r.error.clone().unwrap_or_default().replace(',', ";"),
        fmt_opt(m.map(|m| m.elapsed_s)),
    )
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        let workers: usize = value
            .parse()
            .with_context(|| format!("{WORKERS_ENV} must be a positive integer, got {value:?}"))?;
        builder = builder.num_threads(workers.max(1));
    }
    Ok(builder.build()?)
}

/// Run the full sweep, writing `sweep.csv`, `trials.csv`, `pd.svg`, and
/// `pf.svg` into `out_dir` (rows are flushed per point as they complete).
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SweepOutput> {
    let points = resolve_points(cfg)?;
    fs::create_dir_all(out_dir)?;
    let pool = worker_pool()?;

    let mut sweep_csv = fs::File::create(out_dir.join("sweep.csv"))?;
    writeln!(sweep_csv, "{SWEEP_CSV_HEADER}")?;
    let mut trials_csv = fs::File::create(out_dir.join("trials.csv"))?;
    writeln!(trials_csv, "{TRIALS_CSV_HEADER}")?;

    let mut rows = Vec::with_capacity(points.len());
    let mut all_records = Vec::with_capacity(points.len());
    for (point_index, point) in points.iter().enumerate() {
        // trials are independent jobs; collect preserves trial order
        let records: Vec<TrialRecord> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, point, t, trial_seed(cfg.base_seed, point_index, t)))
                .collect()
        });
        let row = aggregate(cfg, point, &records);
        writeln!(sweep_csv, "{}", sweep_row_csv(&row))?;
        sweep_csv.flush()?;
        for r in &records {
            writeln!(trials_csv, "{}", trial_row_csv(point_index, point, r))?;
        }
        trials_csv.flush()?;
        rows.push(row);
        all_records.push((point_index, records));
    }

    write_metric_svg(out_dir, &rows, "pd", |r| r.mean_pd)?;
    write_metric_svg(out_dir, &rows, "pf", |r| r.mean_pf)?;
    Ok(SweepOutput { rows, records: all_records })
}

fn write_metric_svg(
    out_dir: &Path,
    rows: &[SweepRow],
    metric: &str,
    value: impl Fn(&SweepRow) -> f64,
) -> Result<()> {
    let mut series: Vec<Series> = Vec::new();
    for row in rows {
        let name = format!(
            "{} {} snr={}",
            row.architecture,
            row.algorithm,
            snr_field(row.snr_db)
        );
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((row.axis_value, value(row))),
            None => series.push(Series { name, points: vec![(row.axis_value, value(row))] }),
        }
    }
    for s in &mut series {
        s.points
            .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite axis"));
    }
    let axis = rows.first().map(|r| r.axis_kind.clone()).unwrap_or_default();
    let svg = svg_line_plot(&format!("mean {metric}"), &axis, metric, &series);
    write_svg(&out_dir.join(format!("{metric}.svg")), &svg)
}

/// Check aggregated rows against the configured thresholds; returns the
/// failures as human-readable strings.
pub fn threshold_failures(cfg: &ExperimentConfig, rows: &[SweepRow]) -> Vec<String> {
    let Some(thresholds) = cfg.thresholds else {
        return Vec::new();
    };
    let mut failures = Vec::new();
    for row in rows {
        if let Some(min_pd) = thresholds.min_mean_pd {
            if row.mean_pd < min_pd {
                failures.push(format!(
                    "{} {} snr={} axis={}: mean_pd {} < {min_pd}",
                    row.architecture,
                    row.algorithm,
                    snr_field(row.snr_db),
                    fmt_f64(row.axis_value),
                    fmt_f64(row.mean_pd)
                ));
            }
        }
        if let Some(max_pf) = thresholds.max_mean_pf {
            if row.mean_pf > max_pf {
                failures.push(format!(
                    "{} {} snr={} axis={}: mean_pf {} > {max_pf}",
                    row.architecture,
                    row.algorithm,
                    snr_field(row.snr_db),
                    fmt_f64(row.axis_value),
                    fmt_f64(row.mean_pf)
                ));
            }
        }
    }
    failures
}
