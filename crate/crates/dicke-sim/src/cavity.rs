//! Atom-cavity realization and its dispersive reduction.
//!
//! The full model keeps the cavity mode explicitly: basis `|k, n⟩` with `k`
//! the symmetric atomic level and `n` the photon number, truncated at
//! `n_max`. In the frame rotating at `ω₀` for both atoms and field the
//! Hamiltonian reads
//!
//! ```text
//! H(τ) = -δ_c a†a + g(a†S⁻ + aS⁺) + ε(e^{-i((ω_m-ω₀)τ - θ_m)} S⁺ + h.c.)
//! ```
//!
//! with segment-local `τ`, matching the ladder model's drive convention.
//! When `δ_c` dominates `g√(n̄+1)` the cavity is only virtually populated
//! and the exchange term acts like `λ_c S⁺S⁻` with `λ_c = g²/δ_c`;
//! [`compare_models`] quantifies how well that reduction holds by running
//! the same schedule both ways and comparing the reduced atomic states.
//! Truncation is self-checking: whenever sampled population reaches the top
//! Fock level, the run is repeated with a larger basis.

use serde::Serialize;

use crate::dicke::{down_coeff, up_coeff, DickeVector, PhysicalParams, NORM_TOL};
use crate::dynamics::{self, DriveFrame, IntegratorConfig, Method};
use crate::ode::{self, AdaptiveOpts, Rhs, Workspace};
use crate::pulse::PulseSchedule;
use crate::{C64, Error, Result};

/// Hard ceiling for automatic Fock-basis escalation.
const FOCK_LIMIT: usize = 16;

/// Sampled population on the top Fock level above which a truncation is
/// considered untrustworthy.
const TAIL_TOL: f64 = 1e-6;

/// Validity ratio `g√(n̄+1)/δ_c` above which the dispersive reduction is
/// flagged as questionable.
pub const DISPERSIVE_WARN_RATIO: f64 = 0.2;

/// Derived quantities of the dispersive reduction.
#[derive(Clone, Debug, Serialize)]
pub struct DispersiveParams {
    /// Effective exchange rate `g²/δ_c` (rad/s).
    pub lambda_c: f64,
    /// `g√(n̄+1)/δ_c` for the supplied mean photon number.
    pub validity_ratio: f64,
    pub warnings: Vec<String>,
}

/// Evaluates `λ_c` and the validity ratio at a given mean photon number.
pub fn dispersive_params(params: &PhysicalParams, mean_photons: f64) -> Result<DispersiveParams> {
    params.validate()?;
    if mean_photons < 0.0 || mean_photons.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "mean photon number {mean_photons} must be non-negative"
        )));
    }
    let lambda_c = params.g * params.g / params.delta_c;
    let validity_ratio = params.g * (mean_photons + 1.0).sqrt() / params.delta_c;
    let mut warnings = Vec::new();
    if validity_ratio > DISPERSIVE_WARN_RATIO {
        warnings.push(format!(
            "validity ratio g√(n̄+1)/δ_c = {validity_ratio:.3} exceeds {DISPERSIVE_WARN_RATIO}; \
             the dispersive reduction is unreliable here"
        ));
    }
    Ok(DispersiveParams { lambda_c, validity_ratio, warnings })
}

/// Joint atom-field state, amplitudes indexed as `k·(n_max+1) + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomCavityState {
    n_qubits: usize,
    n_max: usize,
    amps: Vec<C64>,
}

impl AtomCavityState {
    pub fn new(n_qubits: usize, n_max: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_max == 0 {
            return Err(Error::InvalidParameter(
                "need at least one qubit and one photon level".into(),
            ));
        }
        let dim = (n_qubits + 1) * (n_max + 1);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { left: amps.len(), right: dim });
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq, tol: NORM_TOL });
        }
        Ok(Self { n_qubits, n_max, amps })
    }

    /// Atoms in the lowest ladder level, cavity in vacuum.
    pub fn ground(n_qubits: usize, n_max: usize) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); (n_qubits + 1) * (n_max + 1)];
        amps[0] = C64::new(1.0, 0.0);
        Self::new(n_qubits, n_max, amps)
    }

    /// A single ladder level with the cavity in vacuum.
    pub fn level_with_vacuum(n_qubits: usize, k: usize, n_max: usize) -> Result<Self> {
        if k > n_qubits {
            return Err(Error::InvalidLevel { k, n: n_qubits });
        }
        let mut amps = vec![C64::new(0.0, 0.0); (n_qubits + 1) * (n_max + 1)];
        amps[k * (n_max + 1)] = C64::new(1.0, 0.0);
        Self::new(n_qubits, n_max, amps)
    }

    fn idx(&self, k: usize, n: usize) -> usize {
        k * (self.n_max + 1) + n
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Photon-number distribution, traced over the atoms.
    pub fn photon_populations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_max + 1];
        for k in 0..=self.n_qubits {
            for (n, o) in out.iter_mut().enumerate() {
                *o += self.amps[self.idx(k, n)].norm_sqr();
            }
        }
        out
    }

    /// Ladder-level distribution, traced over the field.
    pub fn atomic_populations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qubits + 1];
        for (k, o) in out.iter_mut().enumerate() {
            for n in 0..=self.n_max {
                *o += self.amps[self.idx(k, n)].norm_sqr();
            }
        }
        out
    }

    /// `⟨a†a⟩`.
    pub fn mean_photons(&self) -> f64 {
        self.photon_populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Population sitting on the highest retained Fock level.
    pub fn top_fock_population(&self) -> f64 {
        (0..=self.n_qubits)
            .map(|k| self.amps[self.idx(k, self.n_max)].norm_sqr())
            .sum()
    }

    /// `Σ_n |⟨φ ⊗ n|ψ⟩|²`, both states normalized first: the probability
    /// that the atoms, traced over the field, look like `φ`.
    pub fn reduced_overlap(&self, atomic: &DickeVector) -> Result<f64> {
        if atomic.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: atomic.n_qubits(),
                right: self.n_qubits,
            });
        }
        let phi_norm = atomic.norm_sqr();
        let psi_norm = self.norm_sqr();
        let mut total = 0.0;
        for n in 0..=self.n_max {
            let overlap: C64 = (0..=self.n_qubits)
                .map(|k| atomic.amplitudes()[k].conj() * self.amps[self.idx(k, n)])
                .sum();
            total += overlap.norm_sqr();
        }
        Ok(total / (phi_norm * psi_norm))
    }
}

/// One segment's generator over the joint basis.
struct CavityDrive {
    n: usize,
    n_max: usize,
    delta_c: f64,
    g: f64,
    delta: f64,
    theta: f64,
    /// `ε·up(k)` for the external drive.
    drive: Vec<f64>,
    sqrt_n: Vec<f64>,
}

impl CavityDrive {
    fn new(
        n: usize,
        n_max: usize,
        delta_c: f64,
        g: f64,
        epsilon: f64,
        delta: f64,
        theta: f64,
    ) -> Self {
        Self {
            n,
            n_max,
            delta_c,
            g,
            delta,
            theta,
            drive: (0..n).map(|k| epsilon * up_coeff(n, k)).collect(),
            sqrt_n: (0..=n_max + 1).map(|m| (m as f64).sqrt()).collect(),
        }
    }

    fn angular_scale(&self) -> f64 {
        let k_mid = self.n.div_ceil(2);
        let down_max = down_coeff(self.n, k_mid);
        let drive_max = self.drive.iter().cloned().fold(0.0_f64, f64::max);
        self.delta_c * self.n_max as f64
            + 2.0 * self.g * down_max * self.sqrt_n[self.n_max]
            + 2.0 * drive_max
            + self.delta.abs()
    }
}

impl Rhs for CavityDrive {
    fn dim(&self) -> usize {
        (self.n + 1) * (self.n_max + 1)
    }

    fn eval(&self, tau: f64, y: &[C64], dy: &mut [C64]) {
        let width = self.n_max + 1;
        let z = C64::from_polar(1.0, -(self.delta * tau - self.theta));
        let zc = z.conj();
        dy.fill(C64::new(0.0, 0.0));
        for k in 0..=self.n {
            for n in 0..width {
                let b = k * width + n;
                let yb = y[b];
                dy[b] -= self.delta_c * n as f64 * yb;
                // a†S⁻ : |k,n⟩ → |k-1,n+1⟩ and its conjugate.
                if k > 0 && n + 1 < width {
                    let c = self.g * down_coeff(self.n, k) * self.sqrt_n[n + 1];
                    dy[(k - 1) * width + n + 1] += c * yb;
                }
                if k < self.n && n > 0 {
                    let c = self.g * down_coeff(self.n, k + 1) * self.sqrt_n[n];
                    dy[(k + 1) * width + n - 1] += c * yb;
                }
                // External drive on the atoms alone.
                if k < self.n {
                    dy[(k + 1) * width + n] += z * self.drive[k] * yb;
                }
                if k > 0 {
                    dy[(k - 1) * width + n] += zc * self.drive[k - 1] * yb;
                }
            }
        }
        for v in dy.iter_mut() {
            *v = -C64::i() * *v;
        }
    }
}

/// Outcome of a joint atom-field run, with per-sample population traces.
#[derive(Clone, Debug)]
pub struct CavityRun {
    pub final_state: AtomCavityState,
    pub times: Vec<f64>,
    pub atomic_populations: Vec<Vec<f64>>,
    pub photon_populations: Vec<Vec<f64>>,
    pub mean_photons: Vec<f64>,
    /// Peak `⟨a†a⟩` over all samples.
    pub max_mean_photons: f64,
    /// Peak sampled population on the top Fock level.
    pub max_top_fock: f64,
    pub norm_drift: f64,
    pub converged: bool,
    pub steps: usize,
}

/// Evolves the joint state under the schedule. The Fock truncation comes
/// from `initial` and is *not* adjusted here; check `max_top_fock` (or use
/// [`compare_models`], which escalates automatically).
pub fn integrate_cavity(
    schedule: &PulseSchedule,
    initial: &AtomCavityState,
    config: &IntegratorConfig,
) -> Result<CavityRun> {
    let n = schedule.n_qubits();
    if initial.n_qubits != n {
        return Err(Error::DimensionMismatch { left: initial.n_qubits, right: n });
    }
    let params = schedule.params();
    run_drives(
        initial,
        config,
        schedule
            .segments()
            .iter()
            .map(|s| {
                (
                    CavityDrive::new(
                        n,
                        initial.n_max,
                        params.delta_c,
                        params.g,
                        s.amplitude,
                        s.frequency - params.omega0,
                        s.phase,
                    ),
                    s.duration,
                )
            })
            .collect(),
    )
}

/// Shared integration loop over a list of `(generator, duration)` pairs.
fn run_drives(
    initial: &AtomCavityState,
    config: &IntegratorConfig,
    drives: Vec<(CavityDrive, f64)>,
) -> Result<CavityRun> {
    let mut psi = initial.amps.clone();
    let mut ws = Workspace::new(psi.len());
    let snapshot = |psi: &[C64]| AtomCavityState {
        n_qubits: initial.n_qubits,
        n_max: initial.n_max,
        amps: psi.to_vec(),
    };

    let mut times = vec![0.0];
    let first = snapshot(&psi);
    let mut atomic_rows = vec![first.atomic_populations()];
    let mut photon_rows = vec![first.photon_populations()];
    let mut mean_rows = vec![first.mean_photons()];
    let mut max_mean = mean_rows[0];
    let mut max_top = first.top_fock_population();
    let mut norm_drift = (initial.norm_sqr() - 1.0).abs();
    let mut steps = 0usize;
    let mut t_global = 0.0;
    let mut h_carry = f64::INFINITY;

    for (drive, duration) in &drives {
        if *duration <= 0.0 {
            continue;
        }
        let scale = drive.angular_scale().max(1.0 / duration);
        let period = std::f64::consts::TAU / scale;
        let windows = config.samples_per_segment;
        for w in 1..=windows {
            let tau0 = duration * (w - 1) as f64 / windows as f64;
            let tau1 = if w == windows { *duration } else { duration * w as f64 / windows as f64 };
            match config.method {
                Method::Adaptive => {
                    let cap = config.max_step.unwrap_or(period / 6.0);
                    let opts = AdaptiveOpts {
                        rel_tol: config.rel_tol,
                        abs_tol: config.abs_tol,
                        max_step: cap,
                    };
                    h_carry = h_carry.min(cap);
                    steps += ode::integrate_adaptive(
                        drive, tau0, tau1, &mut psi, &mut h_carry, &opts, &mut ws,
                    )?;
                }
                Method::Fixed => {
                    let step = config.max_step.unwrap_or(period / 20.0);
                    steps += ode::integrate_fixed(drive, tau0, tau1, step, &mut psi, &mut ws);
                }
            }
            let state = snapshot(&psi);
            times.push(t_global + tau1);
            mean_rows.push(state.mean_photons());
            max_mean = max_mean.max(*mean_rows.last().unwrap());
            max_top = max_top.max(state.top_fock_population());
            norm_drift = norm_drift.max((state.norm_sqr() - 1.0).abs());
            atomic_rows.push(state.atomic_populations());
            photon_rows.push(state.photon_populations());
        }
        t_global += duration;
    }

    Ok(CavityRun {
        final_state: snapshot(&psi),
        times,
        atomic_populations: atomic_rows,
        photon_populations: photon_rows,
        mean_photons: mean_rows,
        max_mean_photons: max_mean,
        max_top_fock: max_top,
        norm_drift,
        converged: norm_drift <= config.norm_tol,
        steps,
    })
}

/// Peak photon response of a bare ladder level parked next to the undriven
/// cavity. `peak_mean_photons` can exceed the single-excitation swing by a
/// few percent once the two-photon cascade contributes, so bounds phrased
/// per excitation should test `peak_nonvacuum` instead.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VacuumExcursion {
    /// Largest sampled `⟨a†a⟩`.
    pub peak_mean_photons: f64,
    /// Largest sampled probability of holding at least one photon.
    pub peak_nonvacuum: f64,
}

/// Leaves a bare ladder level alone with the undriven cavity for a few
/// detuning periods and reports how big the virtual photon cloud it drags
/// along gets.
pub fn vacuum_photon_excursion(
    params: &PhysicalParams,
    n_qubits: usize,
    level: usize,
    config: &IntegratorConfig,
) -> Result<VacuumExcursion> {
    params.validate()?;
    let n = params.n_max;
    // Three full swings of the |k,0⟩ ↔ |k-1,1⟩ oscillation.
    let duration = 3.0 * std::f64::consts::TAU / params.delta_c;
    let initial = AtomCavityState::level_with_vacuum(n_qubits, level, n)?;
    let drive = CavityDrive::new(n_qubits, n, params.delta_c, params.g, 0.0, 0.0, 0.0);
    let run = run_drives(&initial, config, vec![(drive, duration)])?;
    if run.max_top_fock > TAIL_TOL {
        return Err(Error::TruncationInsufficient(format!(
            "population {:.2e} reached the top Fock level (n_max = {n}); raise n_max",
            run.max_top_fock
        )));
    }
    let peak_nonvacuum = run
        .photon_populations
        .iter()
        .map(|row| row[1..].iter().sum::<f64>())
        .fold(0.0, f64::max);
    Ok(VacuumExcursion { peak_mean_photons: run.max_mean_photons, peak_nonvacuum })
}

/// Side-by-side run of the full atom-cavity model and its dispersive
/// reduction.
#[derive(Clone, Debug, Serialize)]
pub struct ModelComparison {
    /// Reduced-state overlap `Σ_n |⟨φ_eff|ψ_full(·,n)⟩|²`.
    pub fidelity_full_vs_effective: f64,
    /// `1 -` the above.
    pub disagreement: f64,
    /// Peak `⟨a†a⟩` during the full-model run.
    pub max_photon_population: f64,
    /// `g√(n̄_peak+1)/δ_c` using the measured photon peak.
    pub validity_ratio: f64,
    /// Fock truncation the run finally used (after any escalation).
    pub n_max_used: usize,
    /// Worst `|‖ψ‖² − 1|` seen across the two runs.
    pub norm_drift: f64,
    pub warnings: Vec<String>,
}

/// Runs `schedule` under the full atom-cavity model (ground atoms, vacuum
/// field) and under the ladder reduction, then compares the reduced atomic
/// states. The schedule must have been compiled at the dispersive exchange
/// rate `λ = g²/δ_c`, since that is the reduction being tested. The Fock
/// basis starts at `params.n_max` and grows by 2 whenever sampled
/// population touches the top level, up to an internal ceiling.
pub fn compare_models(schedule: &PulseSchedule, config: &IntegratorConfig) -> Result<ModelComparison> {
    let params = schedule.params();
    let lambda_c = params.g * params.g / params.delta_c;
    if (params.lambda - lambda_c).abs() > 1e-9 * lambda_c {
        return Err(Error::InvalidParameter(format!(
            "schedule exchange rate λ = {} is not the dispersive value g²/δ_c = {}",
            params.lambda, lambda_c
        )));
    }

    let n = schedule.n_qubits();
    let effective = dynamics::integrate(
        schedule,
        &DickeVector::ground(n),
        config,
        DriveFrame::Rotating,
    )?;

    let mut n_max = params.n_max.max(2);
    let run = loop {
        let initial = AtomCavityState::ground(n, n_max)?;
        let run = integrate_cavity(schedule, &initial, config)?;
        if run.max_top_fock <= TAIL_TOL {
            break run;
        }
        if n_max >= FOCK_LIMIT {
            return Err(Error::TruncationInsufficient(format!(
                "top Fock level still holds {:.2e} population at n_max = {n_max}; \
                 the field is not virtually populated here",
                run.max_top_fock
            )));
        }
        n_max = (n_max + 2).min(FOCK_LIMIT);
    };

    let fidelity = run.final_state.reduced_overlap(&effective.final_state)?;
    let validity =
        params.g * (run.max_mean_photons + 1.0).sqrt() / params.delta_c;
    let mut warnings = schedule.warnings().to_vec();
    if validity > DISPERSIVE_WARN_RATIO {
        warnings.push(format!(
            "validity ratio g√(n̄+1)/δ_c = {validity:.3} exceeds {DISPERSIVE_WARN_RATIO}"
        ));
    }
    if n_max != params.n_max.max(2) {
        warnings.push(format!(
            "Fock truncation escalated from {} to {n_max}",
            params.n_max.max(2)
        ));
    }
    Ok(ModelComparison {
        fidelity_full_vs_effective: fidelity,
        disagreement: 1.0 - fidelity,
        max_photon_population: run.max_mean_photons,
        validity_ratio: validity,
        n_max_used: n_max,
        norm_drift: run.norm_drift.max(effective.norm_drift),
        warnings,
    })
}

/// CSV trace of a joint run: time, atomic level populations, photon-number
/// populations, then `⟨a†a⟩`.
pub fn write_cavity_csv<W: std::io::Write>(run: &CavityRun, out: &mut W) -> std::io::Result<()> {
    let n_levels = run.atomic_populations[0].len();
    let n_fock = run.photon_populations[0].len();
    write!(out, "time_s")?;
    for k in 0..n_levels {
        write!(out, ",pop_{k}")?;
    }
    for n in 0..n_fock {
        write!(out, ",photon_{n}")?;
    }
    writeln!(out, ",mean_photons")?;
    for (i, t) in run.times.iter().enumerate() {
        write!(out, "{t}")?;
        for p in &run.atomic_populations[i] {
            write!(out, ",{p}")?;
        }
        for p in &run.photon_populations[i] {
            write!(out, ",{p}")?;
        }
        writeln!(out, ",{}", run.mean_photons[i])?;
    }
    Ok(())
}
