//! CLI for the sub-Nyquist sampling laboratory.
//!
//! Exit codes: 0 on success, 1 on configuration or runtime errors, 2 when
//! `sweep --assert` finds a threshold violation.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dawc::config::load_config;
use dawc::report::{fmt_opt, svg_line_plot, write_svg, Series};
use dawc::sweep::{run_sweep, threshold_failures};
use dawc::trial::{resolve_points, run_trial};
use dawc_core::frontend::validate_params;
use dawc_core::signal::make_random_spec;
use dawc_core::theory::feasibility_sweep;

#[derive(Parser)]
#[command(name = "dawc", version, about = "Sub-Nyquist multiband sampling laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an experiment configuration against the architecture
    /// admissibility conditions and print the parameter report.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Seed for the reference signal draw used by the signal-dependent
        /// checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a single seeded trial at one resolved sweep point and print the
    /// metrics as JSON.
    Trial {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Index into the resolved sweep points (see `validate` for the
        /// list).
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// Run the full Monte Carlo sweep, writing sweep.csv / trials.csv /
    /// pd.svg / pf.svg.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory (default "out").
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with code 2 if configured thresholds are violated.
        #[arg(long, default_value_t = false)]
        assert: bool,
    },
    /// Emit theory artifacts.
    Theory {
        /// Sweep the recovery-guarantee feasibility region over
        /// (gamma, omega) and write fig5.csv plus fig5.svg.
        #[arg(long, default_value_t = false)]
        fig5: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config, seed } => {
            let cfg = load_config(&config)?;
            let reference = make_random_spec(
                cfg.signal.n_sig,
                &cfg.signal.bandwidth_pool_hz,
                cfg.signal.f_max_hz,
                cfg.signal.window_s,
                seed,
            )?;
            let points = resolve_points(&cfg)?;
            println!("{} resolved sweep points", points.len());
            let mut seen = Vec::new();
            for (i, point) in points.iter().enumerate() {
                let key = (point.architecture, point.frontend.channels);
                let first_of_kind = !seen.contains(&key);
                seen.push(key);
                println!(
                    "[{i}] {:?} channels={} sparsity={} snr={:?} axis={}",
                    point.architecture,
                    point.frontend.channels,
                    point.solver.sparsity,
                    point.snr_db,
                    point.axis_value,
                );
                if first_of_kind {
                    let report = validate_params(&point.frontend, Some(&reference));
                    println!("{report}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trial { config, seed, point } => {
            let cfg = load_config(&config)?;
            let points = resolve_points(&cfg)?;
            if point >= points.len() {
                bail!("point {point} out of range: {} resolved points", points.len());
            }
            let record = run_trial(&cfg, &points[point], 0, seed);
            println!("{}", serde_json::to_string_pretty(&record)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, trials, out, assert } => {
            let mut cfg = load_config(&config)?;
            if let Some(t) = trials {
                cfg.trials = t;
                cfg.validate()?;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from("out"));
            let output = run_sweep(&cfg, &out_dir)
                .with_context(|| format!("sweep into {}", out_dir.display()))?;
            for row in &output.rows {
                println!("{}", dawc::sweep::sweep_row_csv(row));
            }
            println!("wrote {}", out_dir.join("sweep.csv").display());
            if assert {
                let failures = threshold_failures(&cfg, &output.rows);
                if !failures.is_empty() {
                    for f in &failures {
                        eprintln!("threshold violation: {f}");
                    }
                    return Ok(ExitCode::from(2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory { fig5, out } => {
            if !fig5 {
                bail!("nothing to do: pass --fig5");
            }
            std::fs::create_dir_all(&out)?;
            let gammas: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
            let rows = feasibility_sweep(&gammas, 1000)?;
            let mut csv = String::from("gamma,omega,gap,delta_bound\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    r.gamma,
                    r.omega,
                    r.gap,
                    fmt_opt(r.delta_bound)
                ));
            }
            std::fs::write(out.join("fig5.csv"), csv)?;
            let series: Vec<Series> = gammas
                .iter()
                .map(|&g| Series {
                    name: format!("gamma={g}"),
                    points: rows
                        .iter()
                        .filter(|r| r.gamma == g)
                        .filter_map(|r| r.delta_bound.map(|b| (r.omega, b)))
                        .collect(),
                })
                .collect();
            let svg = svg_line_plot(
                "admissible 3s-order RIC bound",
                "omega",
                "delta bound",
                &series,
            );
            write_svg(&out.join("fig5.svg"), &svg)?;
            println!("wrote {}", out.join("fig5.csv").display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
