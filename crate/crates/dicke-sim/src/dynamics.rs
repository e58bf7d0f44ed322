//! Schrödinger integration of a pulse schedule on the symmetric ladder.
//!
//! Two frames are supported:
//!
//! - **Rotating** (canonical): the interaction picture with respect to
//!   `ω₀ S_z`, taken with segment-local time. The diagonal carries the
//!   exchange shifts `α_k`; the drive couples neighbors with phase
//!   `e^{-i((ω_m - ω₀)τ - θ_m)}`, `τ` measured from the segment start. The
//!   frame itself never changes at a segment boundary, so states pass across
//!   boundaries untouched and the compiled phases `θ_m` mean exactly what the
//!   compiler solved for.
//! - **Lab**: the full Hamiltonian including `ω₀ S_z`, with the drive carrier
//!   `Φ_m(t) = ω₀ t + (ω_m - ω₀)(t - T_{m-1}) - θ_m`. This is the
//!   phase-coherent synthesis a hardware source would need; with it the lab
//!   state equals the rotating one up to the diagonal `e^{-i ω₀ S_z t}`, so
//!   level populations agree along the whole trajectory. Lab runs are meant
//!   as a cross-check with an artificially small `ω₀`; at realistic qubit
//!   frequencies the carrier is far too fast to integrate directly.
//!
//! The integrator never renormalizes: norm drift is the reported health
//! metric, and a run whose drift exceeds the configured tolerance is flagged
//! non-converged.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicke::{level_shift, up_coeff, DickeVector, PhysicalParams};
use crate::ode::{self, AdaptiveOpts, Rhs, Workspace};
use crate::pulse::PulseSchedule;
use crate::{C64, Error, Result};

/// Which picture the state vector lives in during integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveFrame {
    Lab,
    Rotating,
}

/// Stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dormand-Prince 5(4) with embedded error control.
    Adaptive,
    /// Classic fourth-order steps of fixed size.
    Fixed,
}

/// Integrator settings. `max_step` doubles as the fixed-step size when
/// `method` is [`Method::Fixed`]; when omitted, a step is derived from the
/// fastest angular scale of each segment. In the lab frame the step is
/// always forced to at most a twentieth of the shortest drive period.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    pub samples_per_segment: usize,
    /// Norm-drift bound above which the run is flagged non-converged.
    pub norm_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Adaptive,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
            samples_per_segment: 200,
            norm_tol: 1e-9,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        if [self.rel_tol, self.abs_tol].iter().any(|&v| v <= 0.0 || v.is_nan()) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.samples_per_segment == 0 {
            return Err(Error::InvalidParameter("samples_per_segment must be at least 1".into()));
        }
        if let Some(h) = self.max_step {
            if h <= 0.0 || h.is_nan() {
                return Err(Error::InvalidParameter("max_step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one integration: final state (always reported in the rotating
/// frame), sampled trajectory (in the frame it was integrated in), and
/// health metrics.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationResult {
    pub frame: DriveFrame,
    /// `|⟨target|ψ(T)⟩|²` against the schedule's target, frames aligned.
    pub fidelity: f64,
    /// `max |1 - ‖ψ‖²|` over all samples.
    pub norm_drift: f64,
    /// Whether the norm drift stayed within the configured tolerance.
    pub converged: bool,
    /// Accepted integrator steps.
    pub steps: usize,
    #[serde(rename = "total_time_s")]
    pub total_time: f64,
    pub final_populations: Vec<f64>,
    pub final_state: DickeVector,
    #[serde(skip)]
    times: Vec<f64>,
    #[serde(skip)]
    states: Vec<Vec<C64>>,
}

impl SimulationResult {
    /// Sample times, starting at 0.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Raw sampled amplitudes in the integration frame, one row per time.
    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    /// `|c_k|²` rows matching [`times`](Self::times); frame-independent.
    pub fn population_rows(&self) -> Vec<Vec<f64>> {
        self.states
            .iter()
            .map(|row| row.iter().map(|z| z.norm_sqr()).collect())
            .collect()
    }
}

/// Population above `max_level`, i.e. outside the ladder prefix a schedule
/// is meant to populate.
pub fn off_target_population(state: &DickeVector, max_level: usize) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k > max_level)
        .map(|(_, z)| z.norm_sqr())
        .sum()
}

/// `|⟨a|b⟩|²` for equally sized states.
pub fn fidelity(a: &DickeVector, b: &DickeVector) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch { left: a.n_qubits(), right: b.n_qubits() });
    }
    let overlap: C64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr())
}

/// Drive coefficients of one segment, shared by the dense matrix view and
/// the matrix-free right-hand side so the two cannot drift apart.
struct LadderDrive {
    n: usize,
    /// Full diagonal: `α_k`, plus `(k - N/2) ω₀` in the lab frame.
    diag: Vec<f64>,
    /// `ε · √((N-k)(k+1))` for `k = 0..N`.
    coupling: Vec<f64>,
    /// Drive frequency relative to `ω₀`.
    delta: f64,
    theta: f64,
    /// Lab frame only: `(ω₀, segment start time)` for the coherent carrier.
    carrier: Option<(f64, f64)>,
}

impl LadderDrive {
    fn new(
        n: usize,
        params: &PhysicalParams,
        frequency: f64,
        theta: f64,
        amplitude: f64,
        frame: DriveFrame,
        segment_start: f64,
    ) -> Self {
        let lab = frame == DriveFrame::Lab;
        let diag = (0..=n)
            .map(|k| {
                let shift = level_shift(n, k, params.lambda);
                if lab {
                    shift + (k as f64 - n as f64 / 2.0) * params.omega0
                } else {
                    shift
                }
            })
            .collect();
        let coupling = (0..n).map(|k| amplitude * up_coeff(n, k)).collect();
        Self {
            n,
            diag,
            coupling,
            delta: frequency - params.omega0,
            theta,
            carrier: lab.then_some((params.omega0, segment_start)),
        }
    }

    /// Phase of the coefficient multiplying the raising operator at local
    /// time `tau`.
    fn drive_phase(&self, tau: f64) -> f64 {
        let carrier = match self.carrier {
            Some((omega0, start)) => omega0 * (start + tau),
            None => 0.0,
        };
        -(carrier + self.delta * tau - self.theta)
    }

    fn dense(&self, tau: f64) -> Array2<C64> {
        let dim = self.n + 1;
        let mut h = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
        let up_phase = C64::from_polar(1.0, self.drive_phase(tau));
        for k in 0..dim {
            h[[k, k]] = C64::new(self.diag[k], 0.0);
            if k < self.n {
                let c = self.coupling[k] * up_phase;
                h[[k + 1, k]] = c;
                h[[k, k + 1]] = c.conj();
            }
        }
        h
    }

    /// Fastest angular scale present, used to bound step sizes.
    fn angular_scale(&self) -> f64 {
        let diag_span = self.diag.iter().cloned().fold(0.0_f64, f64::max)
            - self.diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let coupling_max = self.coupling.iter().cloned().fold(0.0_f64, f64::max);
        let carrier = self.carrier.map_or(0.0, |(w, _)| w);
        diag_span + self.delta.abs() + 2.0 * coupling_max + carrier
    }
}

impl Rhs for LadderDrive {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn eval(&self, tau: f64, y: &[C64], dy: &mut [C64]) {
        let up_phase = C64::from_polar(1.0, self.drive_phase(tau));
        let down_phase = up_phase.conj();
        for k in 0..=self.n {
            let mut acc = self.diag[k] * y[k];
            if k > 0 {
                acc += up_phase * self.coupling[k - 1] * y[k - 1];
            }
            if k < self.n {
                acc += down_phase * self.coupling[k] * y[k + 1];
            }
            dy[k] = -C64::i() * acc;
        }
    }
}

/// Dense Hamiltonian at global time `t` under the given schedule and frame.
///
/// `t` must lie within `[0, total_duration]`; boundary instants resolve to
/// the segment that starts there.
pub fn hamiltonian_at(schedule: &PulseSchedule, t: f64, frame: DriveFrame) -> Result<Array2<C64>> {
    let segments = schedule.segments();
    if segments.is_empty() {
        return Err(Error::InvalidSchedule("schedule has no segments".into()));
    }
    if !(0.0..=schedule.total_duration() * (1.0 + 1e-12)).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside the schedule span [0, {}]",
            schedule.total_duration()
        )));
    }
    let starts = schedule.segment_starts();
    let mut pick = segments.len() - 1;
    for (i, &start) in starts.iter().enumerate() {
        if t >= start && (t < start + segments[i].duration || segments[i].duration == 0.0) {
            pick = i;
            break;
        }
    }
    let seg = &segments[pick];
    let drive = LadderDrive::new(
        schedule.n_qubits(),
        schedule.params(),
        seg.frequency,
        seg.phase,
        seg.amplitude,
        frame,
        starts[pick],
    );
    Ok(drive.dense(t - starts[pick]))
}

/// Integrates the schedule from `initial`, sampling
/// `config.samples_per_segment` points per segment.
pub fn integrate(
    schedule: &PulseSchedule,
    initial: &DickeVector,
    config: &IntegratorConfig,
    frame: DriveFrame,
) -> Result<SimulationResult> {
    integrate_detuned(schedule, initial, config, frame, 0.0)
}

/// [`integrate`] with every segment's drive frequency shifted down by
/// `detuning` (positive values move the drive toward the next up-ladder
/// resonance at `2λ`). Used by [`leakage_spectrum`].
pub fn integrate_detuned(
    schedule: &PulseSchedule,
    initial: &DickeVector,
    config: &IntegratorConfig,
    frame: DriveFrame,
    detuning: f64,
) -> Result<SimulationResult> {
    config.validate()?;
    schedule.params().validate()?;
    let n = schedule.n_qubits();
    if initial.n_qubits() != n {
        return Err(Error::DimensionMismatch { left: initial.n_qubits(), right: n });
    }

    let mut psi: Vec<C64> = initial.amplitudes().to_vec();
    let mut times = vec![0.0];
    let mut states = vec![psi.clone()];
    let mut norm_drift = (norm_sq(&psi) - 1.0).abs();
    let mut ws = Workspace::new(n + 1);
    let mut steps = 0usize;
    let mut t_global = 0.0;
    let mut h_carry = f64::INFINITY;

    for (seg, seg_start) in schedule.segments().iter().zip(schedule.segment_starts()) {
        if seg.duration <= 0.0 {
            continue;
        }
        let drive = LadderDrive::new(
            n,
            schedule.params(),
            seg.frequency - detuning,
            seg.phase,
            seg.amplitude,
            frame,
            seg_start,
        );
        let scale = drive.angular_scale().max(1.0 / seg.duration);
        let period = std::f64::consts::TAU / scale;
        let (fixed_step, adaptive_cap) = match frame {
            DriveFrame::Lab => {
                let cap = period / 20.0;
                (config.max_step.unwrap_or(cap).min(cap), config.max_step.unwrap_or(cap).min(cap))
            }
            DriveFrame::Rotating => (
                config.max_step.unwrap_or(period / 20.0),
                config.max_step.unwrap_or(period / 6.0),
            ),
        };
        let opts = AdaptiveOpts {
            rel_tol: config.rel_tol,
            abs_tol: config.abs_tol,
            max_step: adaptive_cap,
        };
        h_carry = h_carry.min(adaptive_cap);

        let windows = config.samples_per_segment;
        for w in 1..=windows {
            let tau0 = seg.duration * (w - 1) as f64 / windows as f64;
            let tau1 = if w == windows {
                seg.duration
            } else {
                seg.duration * w as f64 / windows as f64
            };
            match config.method {
                Method::Adaptive => {
                    steps += ode::integrate_adaptive(
                        &drive,
                        tau0,
                        tau1,
                        &mut psi,
                        &mut h_carry,
                        &opts,
                        &mut ws,
                    )?;
                }
                Method::Fixed => {
                    steps += ode::integrate_fixed(&drive, tau0, tau1, fixed_step, &mut psi, &mut ws);
                }
            }
            times.push(t_global + tau1);
            states.push(psi.clone());
            norm_drift = norm_drift.max((norm_sq(&psi) - 1.0).abs());
        }
        t_global += seg.duration;
    }

    let final_rotating = match frame {
        DriveFrame::Rotating => psi.clone(),
        DriveFrame::Lab => {
            // Undo e^{-i ω₀ S_z T}: the only difference between the frames.
            let omega0 = schedule.params().omega0;
            psi.iter()
                .enumerate()
                .map(|(k, z)| {
                    z * C64::from_polar(1.0, (k as f64 - n as f64 / 2.0) * omega0 * t_global)
                })
                .collect()
        }
    };
    let final_state = DickeVector::from_raw(n, final_rotating);
    let fidelity = fidelity(&schedule.target().to_state(), &final_state)?;

    Ok(SimulationResult {
        frame,
        fidelity,
        norm_drift,
        converged: norm_drift <= config.norm_tol,
        steps,
        total_time: t_global,
        final_populations: final_state.populations(),
        final_state,
        times,
        states,
    })
}

fn norm_sq(psi: &[C64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

/// One point of a detuning sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectrumPoint {
    /// How far the drive was shifted down in frequency (rad/s).
    pub detuning: f64,
    /// Final population above the levels the schedule addresses.
    pub off_target_population: f64,
}

/// Re-runs the schedule from `initial` once per grid value, shifting every
/// segment's drive frequency down by that value, and reports the final
/// population outside the intended ladder prefix. Points run in parallel;
/// the output order matches the grid.
pub fn leakage_spectrum(
    schedule: &PulseSchedule,
    initial: &DickeVector,
    config: &IntegratorConfig,
    grid: &[f64],
) -> Result<Vec<SpectrumPoint>> {
    let manifold = schedule.segments().len();
    grid.par_iter()
        .map(|&detuning| {
            let run = integrate_detuned(schedule, initial, config, DriveFrame::Rotating, detuning)?;
            Ok(SpectrumPoint {
                detuning,
                off_target_population: off_target_population(&run.final_state, manifold),
            })
        })
        .collect()
}

/// Writes the sampled trajectory as CSV: `time_s`, one `pop_k` column per
/// level, then `re_k`/`im_k` amplitude columns in the integration frame.
pub fn write_trajectory_csv<W: std::io::Write>(
    result: &SimulationResult,
    out: &mut W,
) -> std::io::Result<()> {
    let n_levels = result.final_populations.len();
    write!(out, "time_s")?;
    for k in 0..n_levels {
        write!(out, ",pop_{k}")?;
    }
    for k in 0..n_levels {
        write!(out, ",re_{k},im_{k}")?;
    }
    writeln!(out)?;
    for (t, row) in result.times.iter().zip(&result.states) {
        write!(out, "{t}")?;
        for z in row {
            write!(out, ",{}", z.norm_sqr())?;
        }
        for z in row {
            write!(out, ",{},{}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
