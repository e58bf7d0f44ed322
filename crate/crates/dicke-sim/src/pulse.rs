//! Schedule synthesis: from a target superposition to a pulse sequence.
//!
//! The protocol climbs the ladder one rung at a time. Segment `m` drives the
//! `m-1 → m` transition on resonance; its duration fixes how much amplitude
//! stays behind on level `m-1`, and its drive phase fixes that amplitude's
//! final phase. Because the exchange shifts `α_k` keep running during every
//! later segment, the compiler solves the phases through an explicit ledger:
//! after the full schedule the amplitude on level `k` carries
//!
//! ```text
//! arg c_k = Σ_{j<=k} θ_j - k·π/2 - Σ_{j<=k} α_j t_j - α_k · Σ_{j>k} t_j
//! ```
//!
//! (each promotion contributes `-i e^{iθ_j}`, each segment applies the
//! diagonal `e^{-i α_k t}` to every level). Durations depend only on the
//! target magnitudes, so they are solved first and the ledger is then
//! inverted segment by segment.
//!
//! [`simulate_ideal`] applies the same closed-form per-segment map, which is
//! exact when each pulse talks only to its resonant pair; the integrator in
//! [`crate::dynamics`] quantifies how far a real schedule deviates from it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dicke::{
    level_shift, transition_frequency, up_coeff, DickeVector, NORM_TOL, PhysicalParams,
};
use crate::{C64, Error, Result};

/// Magnitudes at or below this are treated as absent when trimming trailing
/// target amplitudes and when picking the global-phase pivot.
pub const AMPLITUDE_TRIM_TOL: f64 = 1e-12;

/// A normalized target superposition `Σ_k d_k |k⟩` over ladder levels
/// `0..=K`, `K <= N`.
///
/// Construction rotates the vector by a global phase so the first
/// non-negligible amplitude is real and nonnegative (the applied angle is
/// recorded), then renormalizes exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TargetData")]
pub struct TargetState {
    n_qubits: usize,
    #[serde(with = "crate::serde_c64::vec")]
    amplitudes: Vec<C64>,
    #[serde(rename = "global_phase_applied_rad")]
    global_phase_applied: f64,
}

impl TargetState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("n_qubits must be at least 1".into()));
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("target needs at least one amplitude".into()));
        }
        if amplitudes.len() > n_qubits + 1 {
            return Err(Error::OutOfLadder { k: amplitudes.len() - 1, n: n_qubits });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite target amplitude".into()));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq, tol: NORM_TOL });
        }

        let pivot = amplitudes
            .iter()
            .position(|z| z.norm() > AMPLITUDE_TRIM_TOL)
            .expect("a normalized vector has a non-negligible entry");
        let phase = amplitudes[pivot].arg();
        let rot = C64::from_polar(1.0, -phase);
        let scale = 1.0 / norm_sq.sqrt();
        let mut amplitudes: Vec<C64> = amplitudes.into_iter().map(|z| z * rot * scale).collect();
        // The pivot is exactly real by construction; drop its rounding dust.
        amplitudes[pivot] = C64::new(amplitudes[pivot].norm(), 0.0);

        Ok(Self { n_qubits, amplitudes, global_phase_applied: phase })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Amplitudes `d_0..d_K` after the global-phase rotation.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Angle the whole vector was rotated by at construction.
    pub fn global_phase_applied(&self) -> f64 {
        self.global_phase_applied
    }

    /// The target as a full `(N + 1)`-level state, zero-padded above `K`.
    pub fn to_state(&self) -> DickeVector {
        let mut amps = self.amplitudes.clone();
        amps.resize(self.n_qubits + 1, C64::new(0.0, 0.0));
        DickeVector::from_raw(self.n_qubits, amps)
    }
}

#[derive(Deserialize)]
struct TargetData {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
    #[serde(default)]
    global_phase_applied_rad: f64,
}

impl TryFrom<TargetData> for TargetState {
    type Error = Error;

    fn try_from(raw: TargetData) -> Result<Self> {
        let amps = raw.amplitudes.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        let mut target = TargetState::new(raw.n_qubits, amps)?;
        target.global_phase_applied =
            wrap_phase(target.global_phase_applied + raw.global_phase_applied_rad);
        Ok(target)
    }
}

/// One resonant pulse: segment `m` addresses the `m-1 → m` ladder step.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PulseSegment {
    /// 1-based position in the schedule; also names the addressed step.
    pub step_index: usize,
    /// Drive angular frequency `ω_m` (rad/s).
    #[serde(rename = "frequency_rad_s")]
    pub frequency: f64,
    /// Drive phase `θ_m` (rad), referenced to the segment start.
    #[serde(rename = "phase_rad")]
    pub phase: f64,
    /// Drive strength `ε` (rad/s).
    #[serde(rename = "amplitude_rad_s")]
    pub amplitude: f64,
    /// Segment length `t_m` (s).
    #[serde(rename = "duration_s")]
    pub duration: f64,
}

impl PulseSegment {
    /// Effective Rabi rate of the addressed step.
    pub fn step_rate(&self, n_qubits: usize) -> f64 {
        self.amplitude * up_coeff(n_qubits, self.step_index - 1)
    }
}

/// A validated pulse sequence together with the parameters and target it was
/// compiled for.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ScheduleData")]
pub struct PulseSchedule {
    n_qubits: usize,
    params: PhysicalParams,
    target: TargetState,
    segments: Vec<PulseSegment>,
    #[serde(rename = "total_duration_s")]
    total_duration: f64,
    warnings: Vec<String>,
}

impl PulseSchedule {
    /// Assembles a schedule and checks its structural invariants: segment
    /// indices run 1..=K consecutively, each frequency matches the addressed
    /// transition, each amplitude matches `params.epsilon`, and each duration
    /// stays on the principal branch `[0, π/(2Ω_m)]`.
    pub fn from_parts(
        params: PhysicalParams,
        target: TargetState,
        segments: Vec<PulseSegment>,
        warnings: Vec<String>,
    ) -> Result<Self> {
        params.validate()?;
        let n = target.n_qubits();
        if segments.len() > n {
            return Err(Error::InvalidSchedule(format!(
                "{} segments but only {n} ladder steps exist",
                segments.len()
            )));
        }
        for (i, seg) in segments.iter().enumerate() {
            let m = i + 1;
            if seg.step_index != m {
                return Err(Error::InvalidSchedule(format!(
                    "segment {m} carries step_index {}",
                    seg.step_index
                )));
            }
            if !seg.duration.is_finite() || seg.duration < 0.0 {
                return Err(Error::InvalidSchedule(format!(
                    "segment {m} has invalid duration {}",
                    seg.duration
                )));
            }
            let expected_freq = transition_frequency(n, m - 1, params.omega0, params.lambda);
            if !close(seg.frequency, expected_freq, 1e-9) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {m} frequency {} does not match the {}->{} transition at {}",
                    seg.frequency,
                    m - 1,
                    m,
                    expected_freq
                )));
            }
            if !close(seg.amplitude, params.epsilon, 1e-12) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {m} amplitude {} does not match epsilon = {}",
                    seg.amplitude, params.epsilon
                )));
            }
            let cap = FRAC_PI_2 / seg.step_rate(n);
            if seg.duration > cap * (1.0 + 1e-9) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {m} duration {} exceeds the principal-branch cap {cap}",
                    seg.duration
                )));
            }
        }
        let total_duration = segments.iter().map(|s| s.duration).sum();
        Ok(Self { n_qubits: n, params, target, segments, total_duration, warnings })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn target(&self) -> &TargetState {
        &self.target
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.total_duration
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Global start time of each segment.
    pub fn segment_starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = acc;
                acc += s.duration;
                start
            })
            .collect()
    }
}

#[derive(Deserialize)]
struct ScheduleData {
    n_qubits: usize,
    params: PhysicalParams,
    target: TargetState,
    segments: Vec<PulseSegment>,
    total_duration_s: f64,
    #[serde(default)]
    warnings: Vec<String>,
}

impl TryFrom<ScheduleData> for PulseSchedule {
    type Error = Error;

    fn try_from(raw: ScheduleData) -> Result<Self> {
        if raw.n_qubits != raw.target.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: raw.n_qubits,
                right: raw.target.n_qubits(),
            });
        }
        let schedule =
            PulseSchedule::from_parts(raw.params, raw.target, raw.segments, raw.warnings)?;
        if !close(schedule.total_duration, raw.total_duration_s, 1e-9) {
            return Err(Error::InvalidSchedule(format!(
                "stored total duration {} disagrees with the segment sum {}",
                raw.total_duration_s, schedule.total_duration
            )));
        }
        Ok(schedule)
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Compiles a target superposition into a resonant pulse sequence.
///
/// Trailing amplitudes at or below [`AMPLITUDE_TRIM_TOL`] are dropped, so the
/// ground-state target compiles to an empty schedule. Durations come from the
/// principal branch `t_m = arccos(x_m) / Ω_m` with
/// `x_m = |d_{m-1}| / √(1 - Σ_{j<m-1} |d_j|²)`; phases solve the ledger
/// described in the module docs.
pub fn compile(target: &TargetState, params: &PhysicalParams) -> Result<PulseSchedule> {
    params.validate()?;
    let n = target.n_qubits();
    let d = target.amplitudes();
    let steps = d
        .iter()
        .rposition(|z| z.norm() > AMPLITUDE_TRIM_TOL)
        .unwrap_or(0);

    let rates: Vec<f64> = (0..steps).map(|l| params.epsilon * up_coeff(n, l)).collect();
    let durations = solve_durations(d, steps, &rates)?;
    let alphas: Vec<f64> = (0..=n).map(|k| level_shift(n, k, params.lambda)).collect();
    let target_phases: Vec<f64> = (0..=steps).map(|k| d[k].arg()).collect();
    let phases = solve_phases(&target_phases, &alphas, &durations);

    let segments: Vec<PulseSegment> = (1..=steps)
        .map(|m| PulseSegment {
            step_index: m,
            frequency: transition_frequency(n, m - 1, params.omega0, params.lambda),
            phase: phases[m - 1],
            amplitude: params.epsilon,
            duration: durations[m - 1],
        })
        .collect();

    let mut warnings = params.warnings();
    if steps + 1 < d.len() {
        warnings.push(format!(
            "trimmed {} trailing target amplitude(s) below {AMPLITUDE_TRIM_TOL:e}",
            d.len() - steps - 1
        ));
    }
    PulseSchedule::from_parts(params.clone(), target.clone(), segments, warnings)
}

/// Duration recursion. Exposed separately so the degenerate branches can be
/// exercised with raw (unnormalized) amplitude lists.
fn solve_durations(d: &[C64], steps: usize, rates: &[f64]) -> Result<Vec<f64>> {
    let mut head_sq = 0.0_f64;
    let mut durations = Vec::with_capacity(steps);
    for m in 1..=steps {
        let remaining = (1.0 - head_sq).max(0.0).sqrt();
        let target_mag = d[m - 1].norm();
        if remaining < 1e-12 {
            if d[m - 1..].iter().any(|z| z.norm() > 1e-9) {
                return Err(Error::InfeasibleTarget(format!(
                    "no amplitude left to distribute at step {m} (remainder {remaining:e})"
                )));
            }
            durations.push(0.0);
            continue;
        }
        let x = target_mag / remaining;
        if x > 1.0 + 1e-6 {
            return Err(Error::InfeasibleTarget(format!(
                "|d_{}| = {target_mag} exceeds the remaining amplitude {remaining}",
                m - 1
            )));
        }
        durations.push(x.min(1.0).acos() / rates[m - 1]);
        head_sq += target_mag * target_mag;
    }
    Ok(durations)
}

/// Inverts the phase ledger segment by segment, given the target phases
/// `φ_0..φ_K`, the level shifts `α_k`, and the already-fixed durations.
fn solve_phases(target_phases: &[f64], alphas: &[f64], durations: &[f64]) -> Vec<f64> {
    let total: f64 = durations.iter().sum();
    let mut theta_sum = 0.0;
    let mut alpha_t_sum = 0.0;
    let mut elapsed = 0.0;
    let mut thetas = Vec::with_capacity(durations.len());
    for (m, &t_m) in durations.iter().enumerate() {
        let level = m + 1;
        alpha_t_sum += alphas[level] * t_m;
        elapsed += t_m;
        let tail = total - elapsed;
        let theta = wrap_phase(
            target_phases[level] + level as f64 * FRAC_PI_2 + alpha_t_sum + alphas[level] * tail
                - theta_sum,
        );
        theta_sum += theta;
        thetas.push(theta);
    }
    thetas
}

/// Accumulated phase per ladder level after the given (prefix of a)
/// schedule, from the same ledger the compiler inverts. Levels the protocol
/// has not reached yet report zero.
pub fn phase_ledger(segments: &[PulseSegment], n_qubits: usize, lambda: f64) -> Vec<f64> {
    let total: f64 = segments.iter().map(|s| s.duration).sum();
    let mut out = vec![0.0; n_qubits + 1];
    let mut theta_sum = 0.0;
    let mut alpha_t_sum = 0.0;
    let mut elapsed = 0.0;
    for (i, seg) in segments.iter().take(n_qubits).enumerate() {
        let k = i + 1;
        let alpha_k = level_shift(n_qubits, k, lambda);
        theta_sum += seg.phase;
        alpha_t_sum += alpha_k * seg.duration;
        elapsed += seg.duration;
        out[k] = wrap_phase(
            theta_sum - k as f64 * FRAC_PI_2 - alpha_t_sum - alpha_k * (total - elapsed),
        );
    }
    out
}

/// Applies the closed-form per-segment map to the all-ground initial state:
/// a two-level rotation on the addressed pair followed by the exchange
/// phases `e^{-i α_k t_m}` on every level.
pub fn simulate_ideal(schedule: &PulseSchedule) -> Result<DickeVector> {
    let n = schedule.n_qubits();
    let lambda = schedule.params().lambda;
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[0] = C64::new(1.0, 0.0);
    for seg in schedule.segments() {
        let lo = seg.step_index - 1;
        let angle = seg.step_rate(n) * seg.duration;
        let (sin, cos) = angle.sin_cos();
        let drive = C64::from_polar(1.0, seg.phase);
        let promote = -C64::i() * drive * sin;
        let demote = -C64::i() * drive.conj() * sin;
        let (a, b) = (c[lo], c[lo + 1]);
        c[lo] = cos * a + demote * b;
        c[lo + 1] = promote * a + cos * b;
        for (k, amp) in c.iter_mut().enumerate() {
            *amp *= C64::from_polar(1.0, -level_shift(n, k, lambda) * seg.duration);
        }
    }
    Ok(DickeVector::from_raw(n, c))
}

/// Draws a random normalized target on levels `0..=max_level` (complex
/// Gaussian amplitudes), for sweeps and round-trip checks.
pub fn random_target<R: rand::Rng + ?Sized>(
    n_qubits: usize,
    max_level: usize,
    rng: &mut R,
) -> Result<TargetState> {
    if max_level > n_qubits {
        return Err(Error::OutOfLadder { k: max_level, n: n_qubits });
    }
    loop {
        let amps: Vec<C64> = (0..=max_level)
            .map(|_| C64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq < 1e-12 {
            continue;
        }
        let scale = 1.0 / norm_sq.sqrt();
        return TargetState::new(n_qubits, amps.into_iter().map(|z| z * scale).collect());
    }
}

fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller on open-interval uniforms.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}
