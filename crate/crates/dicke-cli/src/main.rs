//! Command-line front end for the collective-ladder toolkit: compile pulse
//! schedules, simulate them, budget their errors, and check them against the
//! full-space and cavity models.
//!
//! Every command reads one TOML run configuration (`--config`) and writes
//! its artifacts as JSON (plus CSV trajectories) into `--out`. Artifacts are
//! deterministic: the same configuration and seed produce byte-identical
//! files. Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence, 4 violated invariant.

mod artifact;
mod config;
mod error;

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use dicke_sim::budget::error_budget;
use dicke_sim::cavity::{compare_models, integrate_cavity, write_cavity_csv, AtomCavityState};
use dicke_sim::dicke::{DickeVector, PhysicalParams};
use dicke_sim::dynamics::{integrate, write_trajectory_csv, DriveFrame, SimulationResult};
use dicke_sim::fullspace::{compare_full_and_ladder, symmetric_subspace_leak};
use dicke_sim::pulse::{compile, random_target, PulseSchedule, TargetState};

use artifact::{format_duration, write_atomic, write_json, Envelope, ARTIFACT_VERSION};
use config::{ResolvedConfig, SweepPlan};
use error::CliError;

/// Worst amplitude difference tolerated between the ladder model and the
/// product-basis oracle, an order of magnitude above the integrator
/// truncation seen at default tolerances.
const VALIDATE_AMPLITUDE_TOL: f64 = 1e-8;
/// Population allowed outside the symmetric subspace under uniform driving,
/// where the leak is zero up to rounding.
const VALIDATE_LEAK_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "dicke",
    version,
    about = "Selective pulse schedules on the symmetric ladder of N coupled qubits"
)]
struct Cli {
    /// TOML run configuration (required by every command).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Artifact directory; overrides [output].dir (default ".").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Integration frame; overrides [integrator].frame.
    #[arg(long, global = true, value_enum)]
    frame: Option<FrameArg>,

    /// RNG seed for random-target sweeps; overrides [sweep].seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile the target state into a pulse schedule (schedule.json).
    Compile,
    /// Compile, then integrate the schedule from the ground state
    /// (simulation.json, trajectory.csv).
    Simulate,
    /// Analytic error budget for the compiled schedule (budget.json).
    Budget,
    /// Check the ladder model against the 2^N product-basis oracle
    /// (validation.json).
    Validate,
    /// Compare the effective ladder against the full atom-cavity model
    /// (cavity.json, cavity_trajectory.csv).
    Cavity,
    /// Simulate across swept parameter values or random targets
    /// (point_NNN.json per point, sweep.json).
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Lab,
    Rotating,
}

impl From<FrameArg> for DriveFrame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Lab => DriveFrame::Lab,
            FrameArg::Rotating => DriveFrame::Rotating,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }
    let path = cli.config.as_deref().ok_or_else(|| {
        CliError::Config("missing --config <PATH>; every command is driven by a TOML file".into())
    })?;
    let overrides = config::Overrides {
        out: cli.out.clone(),
        frame: cli.frame.map(Into::into),
        seed: cli.seed,
    };
    let cfg = config::load(path, &overrides)?;
    match cli.command {
        Command::Compile => cmd_compile(&cfg),
        Command::Simulate => cmd_simulate(&cfg),
        Command::Budget => cmd_budget(&cfg),
        Command::Validate => cmd_validate(&cfg),
        Command::Cavity => cmd_cavity(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
    }
}

fn compile_from(cfg: &ResolvedConfig) -> Result<PulseSchedule, CliError> {
    let target = cfg.require_target()?;
    compile(target, &cfg.physical).map_err(CliError::from_compute)
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_compile(cfg: &ResolvedConfig) -> Result<(), CliError> {
    let schedule = compile_from(cfg)?;
    let path = write_json(
        &cfg.output_dir,
        "schedule.json",
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "compile",
            config: cfg,
            result: &schedule,
        },
    )?;

    let segments = schedule.segments();
    println!(
        "compiled {} segment(s), total {}",
        segments.len(),
        format_duration(schedule.total_duration())
    );
    if !segments.is_empty() {
        println!(
            "{:>4}  {:>10}  {:>13}  {:>9}  {:>10}  {:>9}",
            "step", "transition", "detuning_hz", "phase_rad", "drive_hz", "duration"
        );
        for s in segments {
            println!(
                "{:>4}  {:>10}  {:>+13.4e}  {:>9.4}  {:>10.4e}  {:>9}",
                s.step_index,
                format!("{} -> {}", s.step_index - 1, s.step_index),
                (s.frequency - cfg.physical.omega0) / TAU,
                s.phase,
                s.amplitude / TAU,
                format_duration(s.duration),
            );
        }
    }
    report_warnings(schedule.warnings());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_simulate(cfg: &ResolvedConfig) -> Result<(), CliError> {
    let schedule = compile_from(cfg)?;
    let initial = DickeVector::ground(cfg.n_qubits);
    let run = integrate(&schedule, &initial, &cfg.integrator, cfg.frame)
        .map_err(CliError::from_compute)?;

    let json_path = write_json(
        &cfg.output_dir,
        "simulation.json",
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "simulate",
            config: cfg,
            result: &run,
        },
    )?;
    let mut csv = Vec::new();
    write_trajectory_csv(&run, &mut csv)
        .map_err(|e| CliError::Invariant(format!("cannot render trajectory: {e}")))?;
    let csv_path = write_atomic(&cfg.output_dir, "trajectory.csv", &csv)?;

    println!("fidelity to target: {:.6}", run.fidelity);
    println!(
        "norm drift:         {:.3e} ({})",
        run.norm_drift,
        if run.converged { "converged" } else { "NOT CONVERGED" }
    );
    println!("integrator steps:   {}", run.steps);
    println!("schedule duration:  {}", format_duration(run.total_time));
    let pops: Vec<String> = run
        .final_populations
        .iter()
        .map(|p| format!("{p:.4}"))
        .collect();
    println!("final populations:  [{}]", pops.join(", "));
    report_warnings(schedule.warnings());
    println!("wrote {}, {}", json_path.display(), csv_path.display());

    if !run.converged {
        return Err(CliError::NonConvergence(format!(
            "norm drift {:.3e} exceeded the configured bound {:.1e}; artifacts were written",
            run.norm_drift, cfg.integrator.norm_tol
        )));
    }
    Ok(())
}

fn cmd_budget(cfg: &ResolvedConfig) -> Result<(), CliError> {
    let schedule = compile_from(cfg)?;
    let leakage_numeric = match &cfg.budget {
        None => None,
        Some(config::BudgetSource::LeakageNumeric(v)) => Some(*v),
        Some(config::BudgetSource::Simulation(_)) => {
            let path = cfg
                .budget_simulation_path
                .as_deref()
                .expect("simulation source always resolves a path");
            Some(leakage_from_artifact(path, schedule.segments().len())?)
        }
    };
    let budget = error_budget(&schedule, leakage_numeric).map_err(CliError::from_compute)?;

    let path = write_json(
        &cfg.output_dir,
        "budget.json",
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "budget",
            config: cfg,
            result: &budget,
        },
    )?;

    println!("schedule duration:      {}", format_duration(budget.total_time));
    println!("effective line rate:    {:.4} Hz", budget.kappa);
    println!("decoherence infidelity: {:.4e}", budget.decoherence_infidelity);
    println!("leakage (gap 2λ):       {:.4e}", budget.leakage_analytic);
    println!("leakage (gap λ):        {:.4e}", budget.leakage_analytic_alt);
    if let Some(l) = budget.leakage_numeric {
        println!("leakage (measured):     {l:.4e}");
    }
    println!("total error:            {:.4e}", budget.total_error);
    for (flag, note) in &budget.interpretation_flags {
        println!("note [{flag}]: {note}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

/// Pulls the measured off-target population out of a `simulate` artifact:
/// everything above the highest level the schedule addresses.
fn leakage_from_artifact(path: &Path, n_segments: usize) -> Result<f64, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not JSON: {e}", path.display())))?;
    let pops = value
        .pointer("/result/final_populations")
        .and_then(|v| v.as_array())
        .ok_or_else(|| {
            CliError::Config(format!(
                "{} is not a simulate artifact (missing result.final_populations)",
                path.display()
            ))
        })?;
    let mut leak = 0.0;
    for (k, p) in pops.iter().enumerate() {
        let p = p.as_f64().ok_or_else(|| {
            CliError::Config(format!("{}: non-numeric population", path.display()))
        })?;
        if k > n_segments {
            leak += p;
        }
    }
    Ok(leak)
}

fn cmd_validate(cfg: &ResolvedConfig) -> Result<(), CliError> {
    config::check_oracle_capacity(cfg.n_qubits)?;
    let schedule = compile_from(cfg)?;

    let amplitude_mismatch =
        compare_full_and_ladder(&schedule, &cfg.integrator).map_err(CliError::from_compute)?;
    let off_ladder_population = symmetric_subspace_leak(&schedule, &cfg.integrator, None)
        .map_err(CliError::from_compute)?;

    #[derive(Serialize)]
    struct ValidationReport {
        amplitude_mismatch: f64,
        amplitude_tol: f64,
        off_ladder_population: f64,
        off_ladder_tol: f64,
        passed: bool,
    }
    let passed = amplitude_mismatch <= VALIDATE_AMPLITUDE_TOL
        && off_ladder_population <= VALIDATE_LEAK_TOL;
    let report = ValidationReport {
        amplitude_mismatch,
        amplitude_tol: VALIDATE_AMPLITUDE_TOL,
        off_ladder_population,
        off_ladder_tol: VALIDATE_LEAK_TOL,
        passed,
    };

    let path = write_json(
        &cfg.output_dir,
        "validation.json",
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "validate",
            config: cfg,
            result: &report,
        },
    )?;

    println!(
        "ladder vs product-basis oracle: worst amplitude difference {amplitude_mismatch:.3e} \
         (tolerance {VALIDATE_AMPLITUDE_TOL:.1e})"
    );
    println!(
        "population outside the symmetric subspace: {off_ladder_population:.3e} \
         (tolerance {VALIDATE_LEAK_TOL:.1e})"
    );
    println!("verdict: {}", if passed { "PASS" } else { "FAIL" });
    println!("wrote {}", path.display());

    if !passed {
        return Err(CliError::Invariant(
            "the ladder reduction disagrees with the product-basis oracle beyond tolerance"
                .into(),
        ));
    }
    Ok(())
}

fn cmd_cavity(cfg: &ResolvedConfig) -> Result<(), CliError> {
    let p = &cfg.physical;
    let lambda_c = p.g * p.g / p.delta_c;
    if (p.lambda - lambda_c).abs() > 1e-9 * lambda_c {
        return Err(CliError::Config(format!(
            "the cavity comparison tests the dispersive reduction, which needs \
             lambda = g^2/delta_c = {lambda_c:.6e} rad/s; the config sets \
             lambda = {:.6e} rad/s (omit lambda to use the default)",
            p.lambda
        )));
    }
    let schedule = compile_from(cfg)?;

    let report = compare_models(&schedule, &cfg.integrator).map_err(CliError::from_compute)?;
    let initial = AtomCavityState::ground(cfg.n_qubits, report.n_max_used)
        .map_err(CliError::from_compute)?;
    let full_run =
        integrate_cavity(&schedule, &initial, &cfg.integrator).map_err(CliError::from_compute)?;

    let json_path = write_json(
        &cfg.output_dir,
        "cavity.json",
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "cavity",
            config: cfg,
            result: &report,
        },
    )?;
    let mut csv = Vec::new();
    write_cavity_csv(&full_run, &mut csv)
        .map_err(|e| CliError::Invariant(format!("cannot render trajectory: {e}")))?;
    let csv_path = write_atomic(&cfg.output_dir, "cavity_trajectory.csv", &csv)?;

    println!(
        "full model vs effective ladder: disagreement {:.4e}",
        report.disagreement
    );
    println!(
        "peak mean photons: {:.4e} (validity ratio {:.3})",
        report.max_photon_population, report.validity_ratio
    );
    println!("fock levels used: 0..={}", report.n_max_used);
    report_warnings(&report.warnings);
    println!("wrote {}, {}", json_path.display(), csv_path.display());
    Ok(())
}

struct PointSpec {
    index: usize,
    params: PhysicalParams,
    target: TargetState,
    parameter_value_rad_s: Option<f64>,
}

#[derive(Serialize)]
struct SweepRow {
    index: usize,
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter_value_rad_s: Option<f64>,
    fidelity: f64,
    norm_drift: f64,
    converged: bool,
}

fn cmd_sweep(cfg: &ResolvedConfig) -> Result<(), CliError> {
    let plan = cfg.sweep.as_ref().ok_or_else(|| {
        CliError::Config("the sweep command needs a [sweep] section".into())
    })?;

    let (points, parameter_name) = match plan {
        SweepPlan::Parameter { parameter, values_rad_s } => {
            let target = cfg.require_target()?;
            let points = values_rad_s
                .iter()
                .enumerate()
                .map(|(index, &value)| {
                    let params = cfg.with_parameter(*parameter, value).map_err(|e| {
                        CliError::Config(format!("[sweep].values[{index}]: {e}"))
                    })?;
                    Ok(PointSpec {
                        index,
                        params,
                        target: target.clone(),
                        parameter_value_rad_s: Some(value),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (points, Some(parameter.name()))
        }
        SweepPlan::RandomTargets { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let points = (0..*count)
                .map(|index| {
                    let target = random_target(cfg.n_qubits, cfg.n_qubits, &mut rng)
                        .map_err(CliError::from_compute)?;
                    Ok(PointSpec {
                        index,
                        params: cfg.physical.clone(),
                        target,
                        parameter_value_rad_s: None,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (points, None)
        }
    };

    let rows: Vec<Result<SweepRow, CliError>> = points
        .par_iter()
        .map(|point| run_sweep_point(cfg, point, parameter_name))
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, CliError>>()?;

    #[derive(Serialize)]
    struct SweepSummary<'a> {
        points: &'a [SweepRow],
    }
    let path = write_json(
        &cfg.output_dir,
        "sweep.json",
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "sweep",
            config: cfg,
            result: SweepSummary { points: &rows },
        },
    )?;

    for row in &rows {
        let label = match (parameter_name, row.parameter_value_rad_s) {
            (Some(name), Some(v)) => format!("  {name} = {v:.6e} rad/s"),
            _ => String::new(),
        };
        println!(
            "point {:03}: fidelity {:.6}, drift {:.2e}{}{}",
            row.index,
            row.fidelity,
            row.norm_drift,
            if row.converged { "" } else { "  NOT CONVERGED" },
            label,
        );
    }
    println!("wrote {} point file(s) and {}", rows.len(), path.display());

    let stragglers = rows.iter().filter(|r| !r.converged).count();
    if stragglers > 0 {
        return Err(CliError::NonConvergence(format!(
            "{stragglers} of {} sweep points exceeded the norm-drift bound; \
             all artifacts were written",
            rows.len()
        )));
    }
    Ok(())
}

fn run_sweep_point(
    cfg: &ResolvedConfig,
    point: &PointSpec,
    parameter_name: Option<&'static str>,
) -> Result<SweepRow, CliError> {
    let schedule = compile(&point.target, &point.params).map_err(CliError::from_compute)?;
    let initial = DickeVector::ground(cfg.n_qubits);
    let run = integrate(&schedule, &initial, &cfg.integrator, cfg.frame)
        .map_err(CliError::from_compute)?;

    #[derive(Serialize)]
    struct PointResult<'a> {
        index: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        parameter: Option<&'static str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        parameter_value_rad_s: Option<f64>,
        physical: &'a PhysicalParams,
        target: &'a TargetState,
        simulation: &'a SimulationResult,
    }
    let file = format!("point_{:03}.json", point.index);
    write_json(
        &cfg.output_dir,
        &file,
        &Envelope {
            version: ARTIFACT_VERSION,
            command: "sweep",
            config: cfg,
            result: PointResult {
                index: point.index,
                parameter: point.parameter_value_rad_s.and(parameter_name),
                parameter_value_rad_s: point.parameter_value_rad_s,
                physical: &point.params,
                target: &point.target,
                simulation: &run,
            },
        },
    )?;

    Ok(SweepRow {
        index: point.index,
        file,
        parameter_value_rad_s: point.parameter_value_rad_s,
        fidelity: run.fidelity,
        norm_drift: run.norm_drift,
        converged: run.converged,
    })
}
