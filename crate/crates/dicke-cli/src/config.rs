//! Run-configuration schema.
//!
//! A run is described by one TOML file. Parsing is strict — unknown keys are
//! errors, so typos surface immediately with the offending line — and every
//! frequency is normalized to angular units (rad/s) before anything else
//! sees it. The resolved form, including all defaults, is embedded in every
//! artifact the commands write.

use std::fs;
use std::path::{Path, PathBuf};

use dicke_sim::dicke::{PhysicalParams, PRODUCT_BASIS_LIMIT};
use dicke_sim::dynamics::{DriveFrame, IntegratorConfig, Method};
use dicke_sim::pulse::TargetState;
use dicke_sim::C64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::CliError;

/// A frequency as written in the config file. Plain numbers are ordinary
/// frequencies in Hz; the string form `"2pi*X"` names the same quantity in
/// the angular idiom common in the literature. Both normalize to rad/s, so
/// `g = 25e3` and `g = "2pi*25e3"` are the same coupling — the shorthand
/// exists to keep configs readable next to sources that quote `2π × 25 kHz`
/// without anyone converting units by hand.
#[derive(Clone, Copy, Debug)]
struct Frequency(f64);

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged, expecting = "a frequency: a number in Hz or the string \"2pi*X\"")]
        enum Raw {
            Hertz(f64),
            Shorthand(String),
        }
        let rad_s = match Raw::deserialize(d)? {
            Raw::Hertz(v) => std::f64::consts::TAU * v,
            Raw::Shorthand(s) => parse_angular(&s).map_err(serde::de::Error::custom)?,
        };
        Ok(Frequency(rad_s))
    }
}

fn parse_angular(s: &str) -> Result<f64, String> {
    let lower = s.trim().to_ascii_lowercase();
    let rest = lower
        .strip_prefix("2pi")
        .and_then(|r| r.trim_start().strip_prefix('*'))
        .ok_or_else(|| format!("expected a number in Hz or \"2pi*X\", got {s:?}"))?;
    let x: f64 = rest
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse the X in \"2pi*X\" from {s:?}"))?;
    if !x.is_finite() {
        return Err(format!("non-finite frequency {s:?}"));
    }
    Ok(std::f64::consts::TAU * x)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    physical: RawPhysical,
    target: RawTarget,
    #[serde(default)]
    integrator: RawIntegrator,
    #[serde(default)]
    output: RawOutput,
    budget: Option<RawBudget>,
    sweep: Option<RawSweep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysical {
    omega0: Frequency,
    g: Frequency,
    delta_c: Frequency,
    epsilon: Frequency,
    /// Defaults to the dispersive exchange rate `g²/δ_c` when omitted.
    lambda: Option<Frequency>,
    t_r_s: f64,
    t_c_s: f64,
    n_max: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    n_qubits: usize,
    /// Ladder amplitudes `c_0, c_1, …` as `[re, im]` pairs. Shorter lists
    /// than `N + 1` are padded with zeros.
    amplitudes: Option<Vec<[f64; 2]>>,
    /// Alternative polar form: `[magnitude, phase_rad]` pairs.
    amplitudes_polar: Option<Vec<[f64; 2]>>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    method: Option<Method>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_step_s: Option<f64>,
    samples_per_segment: Option<usize>,
    norm_tol: Option<f64>,
    frame: Option<DriveFrame>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    /// Artifact directory; relative paths resolve against the config file's
    /// own directory. Overridden by `--out`.
    dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    /// Off-target population measured elsewhere, folded into the budget.
    leakage_numeric: Option<f64>,
    /// Path to a `simulate` artifact whose final populations supply the
    /// numeric leakage. Relative to the config file's directory.
    simulation: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    /// Physical parameter swept in `parameter` mode.
    parameter: Option<SweepParameter>,
    values: Option<Vec<Frequency>>,
    /// Number of random targets in `random-target` mode.
    random_targets: Option<usize>,
    /// RNG seed for random targets. Overridden by `--seed`.
    seed: Option<u64>,
}

/// Parameter a sweep may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Epsilon,
    Lambda,
    DeltaC,
    G,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Epsilon => "epsilon",
            SweepParameter::Lambda => "lambda",
            SweepParameter::DeltaC => "delta_c",
            SweepParameter::G => "g",
        }
    }
}

/// Resolved sweep plan.
#[derive(Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepPlan {
    Parameter {
        parameter: SweepParameter,
        values_rad_s: Vec<f64>,
    },
    RandomTargets {
        count: usize,
        seed: u64,
    },
}

/// Where the budget command takes its numeric leakage from.
#[derive(Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetSource {
    LeakageNumeric(f64),
    Simulation(String),
}

/// Command-line overrides applied during resolution.
#[derive(Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub frame: Option<DriveFrame>,
    pub seed: Option<u64>,
}

/// Everything a command needs, after unit normalization, defaulting,
/// validation, and command-line overrides. The serialized form (delivery
/// details like the output directory excluded) is embedded verbatim in every
/// JSON artifact, so a result file always names the exact run that made it.
#[derive(Clone, Serialize)]
pub struct ResolvedConfig {
    pub physical: PhysicalParams,
    pub n_qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetState>,
    pub integrator: IntegratorConfig,
    pub frame: DriveFrame,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepPlan>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub budget_simulation_path: Option<PathBuf>,
    #[serde(skip)]
    lambda_explicit: bool,
}

impl ResolvedConfig {
    /// The target state, for commands that cannot run without one.
    pub fn require_target(&self) -> Result<&TargetState, CliError> {
        self.target.as_ref().ok_or_else(|| {
            CliError::Config(
                "this command needs [target].amplitudes (or amplitudes_polar)".into(),
            )
        })
    }

    /// Rebuilds the physical parameters with one value substituted, keeping
    /// the `λ = g²/δ_c` default live when the config relied on it.
    pub fn with_parameter(
        &self,
        p: SweepParameter,
        value: f64,
    ) -> Result<PhysicalParams, dicke_sim::Error> {
        let base = &self.physical;
        let mut lambda = base.lambda;
        let mut epsilon = base.epsilon;
        let mut g = base.g;
        let mut delta_c = base.delta_c;
        match p {
            SweepParameter::Epsilon => epsilon = value,
            SweepParameter::Lambda => lambda = value,
            SweepParameter::DeltaC => delta_c = value,
            SweepParameter::G => g = value,
        }
        if !self.lambda_explicit && p != SweepParameter::Lambda {
            lambda = g * g / delta_c;
        }
        PhysicalParams::new(
            base.omega0,
            lambda,
            epsilon,
            g,
            delta_c,
            base.t_r,
            base.t_c,
            base.n_max,
        )
    }
}

/// Reads, parses, and resolves the configuration at `path`.
pub fn load(path: &Path, overrides: &Overrides) -> Result<ResolvedConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config_dir = path.parent().unwrap_or_else(|| Path::new("."));

    let p = &raw.physical;
    let physical = match p.lambda {
        Some(lambda) => PhysicalParams::new(
            p.omega0.0, lambda.0, p.epsilon.0, p.g.0, p.delta_c.0, p.t_r_s, p.t_c_s, p.n_max,
        ),
        None => PhysicalParams::dispersive(
            p.omega0.0, p.epsilon.0, p.g.0, p.delta_c.0, p.t_r_s, p.t_c_s, p.n_max,
        ),
    }
    .map_err(|e| CliError::Config(format!("[physical]: {e}")))?;

    let n_qubits = raw.target.n_qubits;
    if n_qubits == 0 {
        return Err(CliError::Config("[target].n_qubits must be at least 1".into()));
    }
    let target = resolve_target(&raw.target)?;

    let integrator = resolve_integrator(&raw.integrator)?;
    let frame = overrides
        .frame
        .or(raw.integrator.frame)
        .unwrap_or(DriveFrame::Rotating);

    let budget = match raw.budget {
        None => None,
        Some(b) => Some(resolve_budget(b)?),
    };
    let budget_simulation_path = match &budget {
        Some(BudgetSource::Simulation(rel)) => Some(config_dir.join(rel)),
        _ => None,
    };

    let sweep = match raw.sweep {
        None => None,
        Some(s) => Some(resolve_sweep(s, overrides.seed)?),
    };

    let output_dir = match &overrides.out {
        Some(dir) => dir.clone(),
        None => match &raw.output.dir {
            Some(dir) => config_dir.join(dir),
            None => PathBuf::from("."),
        },
    };

    Ok(ResolvedConfig {
        physical,
        n_qubits,
        target,
        integrator,
        frame,
        budget,
        sweep,
        output_dir,
        budget_simulation_path,
        lambda_explicit: p.lambda.is_some(),
    })
}

fn resolve_target(raw: &RawTarget) -> Result<Option<TargetState>, CliError> {
    let amplitudes = match (&raw.amplitudes, &raw.amplitudes_polar) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "[target]: give either amplitudes or amplitudes_polar, not both".into(),
            ))
        }
        (Some(pairs), None) => pairs.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        (None, Some(pairs)) => pairs
            .iter()
            .map(|&[mag, phase]| C64::from_polar(mag, phase))
            .collect::<Vec<C64>>(),
        (None, None) => return Ok(None),
    };
    TargetState::new(raw.n_qubits, amplitudes)
        .map(Some)
        .map_err(|e| CliError::Config(format!("[target]: {e}")))
}

fn resolve_integrator(raw: &RawIntegrator) -> Result<IntegratorConfig, CliError> {
    let d = IntegratorConfig::default();
    let cfg = IntegratorConfig {
        method: raw.method.unwrap_or(d.method),
        rel_tol: raw.rel_tol.unwrap_or(d.rel_tol),
        abs_tol: raw.abs_tol.unwrap_or(d.abs_tol),
        max_step: raw.max_step_s.or(d.max_step),
        samples_per_segment: raw.samples_per_segment.unwrap_or(d.samples_per_segment),
        norm_tol: raw.norm_tol.unwrap_or(d.norm_tol),
    };
    if [cfg.rel_tol, cfg.abs_tol, cfg.norm_tol]
        .iter()
        .any(|&v| v <= 0.0 || v.is_nan())
    {
        return Err(CliError::Config(
            "[integrator]: tolerances must be positive".into(),
        ));
    }
    if cfg.samples_per_segment == 0 {
        return Err(CliError::Config(
            "[integrator].samples_per_segment must be at least 1".into(),
        ));
    }
    if let Some(h) = cfg.max_step {
        if h <= 0.0 || h.is_nan() {
            return Err(CliError::Config(
                "[integrator].max_step_s must be positive".into(),
            ));
        }
    }
    Ok(cfg)
}

fn resolve_budget(raw: RawBudget) -> Result<BudgetSource, CliError> {
    match (raw.leakage_numeric, raw.simulation) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "[budget]: give either leakage_numeric or simulation, not both".into(),
        )),
        (Some(v), None) => {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::Config(format!(
                    "[budget].leakage_numeric must be a population in [0, 1], got {v}"
                )));
            }
            Ok(BudgetSource::LeakageNumeric(v))
        }
        (None, Some(p)) => Ok(BudgetSource::Simulation(p.display().to_string())),
        (None, None) => Err(CliError::Config(
            "[budget]: needs leakage_numeric or simulation".into(),
        )),
    }
}

fn resolve_sweep(raw: RawSweep, seed_override: Option<u64>) -> Result<SweepPlan, CliError> {
    match (raw.parameter, raw.random_targets) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "[sweep]: parameter mode and random_targets are mutually exclusive".into(),
        )),
        (Some(parameter), None) => {
            let values = raw.values.unwrap_or_default();
            if values.is_empty() {
                return Err(CliError::Config(
                    "[sweep].values must list at least one frequency".into(),
                ));
            }
            if raw.seed.is_some() {
                return Err(CliError::Config(
                    "[sweep].seed only applies to random_targets mode".into(),
                ));
            }
            Ok(SweepPlan::Parameter {
                parameter,
                values_rad_s: values.into_iter().map(|f| f.0).collect(),
            })
        }
        (None, Some(count)) => {
            if count == 0 {
                return Err(CliError::Config(
                    "[sweep].random_targets must be at least 1".into(),
                ));
            }
            if raw.values.is_some() {
                return Err(CliError::Config(
                    "[sweep].values only applies to parameter mode".into(),
                ));
            }
            Ok(SweepPlan::RandomTargets {
                count,
                seed: seed_override.or(raw.seed).unwrap_or(0),
            })
        }
        (None, None) => Err(CliError::Config(
            "[sweep]: set either parameter + values or random_targets".into(),
        )),
    }
}

/// Rejects qubit counts the product-basis oracle cannot hold.
pub fn check_oracle_capacity(n_qubits: usize) -> Result<(), CliError> {
    if n_qubits > PRODUCT_BASIS_LIMIT {
        return Err(CliError::Config(format!(
            "validate needs the 2^N product basis, which is capped at \
             {PRODUCT_BASIS_LIMIT} qubits; got {n_qubits}"
        )));
    }
    Ok(())
}
