//! Product-basis reference evolution for cross-checking the ladder model.
//!
//! Everything here works in the full `2^N` space, basis index `b` with bit
//! `i` set meaning qubit `i` excited. The collective exchange term
//! `λ S⁺S⁻` and a (possibly per-qubit weighted) drive are applied either as
//! dense matrices (small registers) or matrix-free through bit operations;
//! the two paths are interchangeable and tested against each other.
//!
//! A symmetric drive keeps anything launched from the ground state inside
//! the `(N+1)`-dimensional symmetric ladder, so projecting a full-space run
//! onto the ladder basis must reproduce the ladder integrator amplitude for
//! amplitude — that comparison is the point of this module. Breaking the
//! symmetry on purpose (one qubit driven slightly harder) gives the
//! control: population then demonstrably escapes the ladder.

use ndarray::Array2;
use serde::Serialize;

use crate::dicke::{
    dicke_expansion, up_coeff, DickeVector, PhysicalParams, PRODUCT_BASIS_LIMIT,
};
use crate::dynamics::{DriveFrame, IntegratorConfig, Method};
use crate::ode::{self, AdaptiveOpts, Rhs, Workspace};
use crate::pulse::PulseSchedule;
use crate::{C64, Error, Result};

/// Largest register handled by the dense-matrix path; above this the
/// generator is applied through bit operations instead.
const DENSE_LIMIT: usize = 8;

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 || n > PRODUCT_BASIS_LIMIT {
        return Err(Error::CapacityExceeded { n, max: PRODUCT_BASIS_LIMIT });
    }
    Ok(())
}

/// Normalized state over the full product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl FullState {
    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { left: amps.len(), right: 1 << n_qubits });
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > crate::dicke::NORM_TOL {
            return Err(Error::NotNormalized { norm_sq, tol: crate::dicke::NORM_TOL });
        }
        Ok(Self { n_qubits, amps })
    }

    /// All qubits in the lower level.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Embeds a ladder state into the product basis.
    pub fn from_ladder(state: &DickeVector) -> Result<Self> {
        let n = state.n_qubits();
        check_capacity(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for (k, &c) in state.amplitudes().iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let idx = crate::dicke::LadderIndex::new(n, k)?;
            for (b, &v) in dicke_expansion(idx)?.iter().enumerate() {
                amps[b] += c * v;
            }
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `2^N × (N+1)` matrix whose columns are the ladder basis states.
pub fn dicke_isometry(n_qubits: usize) -> Result<Array2<C64>> {
    check_capacity(n_qubits)?;
    let dim = 1 << n_qubits;
    let mut v = Array2::from_elem((dim, n_qubits + 1), C64::new(0.0, 0.0));
    for k in 0..=n_qubits {
        let idx = crate::dicke::LadderIndex::new(n_qubits, k)?;
        for (b, &amp) in dicke_expansion(idx)?.iter().enumerate() {
            v[[b, k]] = amp;
        }
    }
    Ok(v)
}

/// Result of projecting a full-space state onto the ladder basis: raw
/// (unnormalized) ladder amplitudes plus the total weight they carry.
#[derive(Clone, Debug, Serialize)]
pub struct LadderProjection {
    #[serde(with = "crate::serde_c64::vec")]
    pub amplitudes: Vec<C64>,
    /// `Σ|c_k|²`; anything short of the state's norm lives outside the
    /// symmetric subspace.
    pub weight: f64,
}

/// `c_k = ⟨D_k|ψ⟩` for every ladder level.
pub fn project_to_ladder(state: &FullState) -> Result<LadderProjection> {
    let n = state.n_qubits;
    let mut amplitudes = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let idx = crate::dicke::LadderIndex::new(n, k)?;
        let col = dicke_expansion(idx)?;
        let c: C64 = col
            .iter()
            .zip(&state.amps)
            .map(|(v, a)| v.conj() * a)
            .sum();
        amplitudes.push(c);
    }
    let weight = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    Ok(LadderProjection { amplitudes, weight })
}

/// Relabels qubits: qubit `i` of the input becomes qubit `perm[i]` of the
/// output.
pub fn permute_qubits(state: &FullState, perm: &[usize]) -> Result<FullState> {
    let n = state.n_qubits;
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}")));
    }
    let mut amps = vec![C64::new(0.0, 0.0); state.amps.len()];
    for (b, &a) in state.amps.iter().enumerate() {
        let mut b_new = 0usize;
        for (i, &p) in perm.iter().enumerate() {
            if b & (1 << i) != 0 {
                b_new |= 1 << p;
            }
        }
        amps[b_new] = a;
    }
    Ok(FullState { n_qubits: n, amps })
}

/// One pulse segment's generator over the product basis.
struct ProductDrive {
    n: usize,
    lambda: f64,
    delta: f64,
    theta: f64,
    /// Per-qubit drive rate, `ε·w_i`.
    coupling: Vec<f64>,
    /// Dense `(λ S⁺S⁻, weighted raising)` for small registers.
    dense: Option<(Array2<C64>, Array2<C64>)>,
}

impl ProductDrive {
    fn new(
        n: usize,
        params: &PhysicalParams,
        frequency: f64,
        theta: f64,
        amplitude: f64,
        weights: Option<&[f64]>,
    ) -> Result<Self> {
        let coupling: Vec<f64> = match weights {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch { left: w.len(), right: n });
                }
                if w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                    return Err(Error::InvalidParameter("drive weights must be positive".into()));
                }
                w.iter().map(|x| amplitude * x).collect()
            }
            None => vec![amplitude; n],
        };
        let mut drive = Self {
            n,
            lambda: params.lambda,
            delta: frequency - params.omega0,
            theta,
            coupling,
            dense: None,
        };
        if n <= DENSE_LIMIT {
            drive.dense = Some(drive.build_dense());
        }
        Ok(drive)
    }

    fn build_dense(&self) -> (Array2<C64>, Array2<C64>) {
        let dim = 1 << self.n;
        let mut exchange = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
        let mut raising = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
        for b in 0..dim {
            exchange[[b, b]] = C64::new(self.lambda * (b.count_ones() as f64), 0.0);
            for j in 0..self.n {
                if b & (1 << j) == 0 {
                    continue;
                }
                for i in 0..self.n {
                    if i == j || b & (1 << i) != 0 {
                        continue;
                    }
                    let moved = (b & !(1 << j)) | (1 << i);
                    exchange[[moved, b]] += C64::new(self.lambda, 0.0);
                }
            }
            for i in 0..self.n {
                if b & (1 << i) == 0 {
                    raising[[b | (1 << i), b]] += C64::new(self.coupling[i], 0.0);
                }
            }
        }
        (exchange, raising)
    }

    fn drive_factor(&self, tau: f64) -> C64 {
        C64::from_polar(1.0, -(self.delta * tau - self.theta))
    }

    fn angular_scale(&self) -> f64 {
        let k_mid = self.n.div_ceil(2);
        let alpha_span = self.lambda * (k_mid * (self.n - k_mid + 1)) as f64;
        let coupling_max =
            self.coupling.iter().cloned().fold(0.0_f64, f64::max) * up_coeff(self.n, self.n / 2);
        alpha_span + self.delta.abs() + 2.0 * coupling_max
    }
}

impl Rhs for ProductDrive {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn eval(&self, tau: f64, y: &[C64], dy: &mut [C64]) {
        let z = self.drive_factor(tau);
        let zc = z.conj();
        dy.fill(C64::new(0.0, 0.0));
        if let Some((exchange, raising)) = &self.dense {
            let dim = y.len();
            for i in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..dim {
                    acc += exchange[[i, j]] * y[j];
                    acc += z * raising[[i, j]] * y[j];
                    acc += zc * raising[[j, i]] * y[j];
                }
                dy[i] = -C64::i() * acc;
            }
            return;
        }
        for b in 0..y.len() {
            let yb = y[b];
            dy[b] += self.lambda * (b.count_ones() as f64) * yb;
            for j in 0..self.n {
                if b & (1 << j) == 0 {
                    continue;
                }
                let cleared = b & !(1 << j);
                dy[cleared] += zc * self.coupling[j] * yb;
                for i in 0..self.n {
                    if i != j && b & (1 << i) == 0 {
                        dy[cleared | (1 << i)] += self.lambda * yb;
                    }
                }
            }
            for i in 0..self.n {
                if b & (1 << i) == 0 {
                    dy[b | (1 << i)] += z * self.coupling[i] * yb;
                }
            }
        }
        for v in dy.iter_mut() {
            *v = -C64::i() * *v;
        }
    }
}

/// Outcome of a product-basis run, sampled on the same window boundaries the
/// ladder integrator uses (`samples_per_segment` per segment, plus `t = 0`).
#[derive(Clone, Debug)]
pub struct FullSpaceRun {
    pub final_state: FullState,
    pub times: Vec<f64>,
    pub states: Vec<FullState>,
    pub norm_drift: f64,
    pub converged: bool,
    pub steps: usize,
}

/// Evolves `initial` under the schedule in the rotating frame over the full
/// product basis. `drive_weights`, when given, scales each qubit's drive
/// amplitude individually (the exchange interaction stays collective);
/// `None` means the uniform, symmetry-preserving drive.
pub fn integrate_full(
    schedule: &PulseSchedule,
    initial: &FullState,
    config: &IntegratorConfig,
    drive_weights: Option<&[f64]>,
) -> Result<FullSpaceRun> {
    let n = schedule.n_qubits();
    check_capacity(n)?;
    if initial.n_qubits != n {
        return Err(Error::DimensionMismatch { left: initial.n_qubits, right: n });
    }
    let mut psi = initial.amps.clone();
    let mut ws = Workspace::new(psi.len());
    let mut times = vec![0.0];
    let mut states = vec![FullState::from_raw(n, psi.clone())];
    let mut norm_drift = (initial.norm_sqr() - 1.0).abs();
    let mut steps = 0usize;
    let mut t_global = 0.0;
    let mut h_carry = f64::INFINITY;

    for seg in schedule.segments() {
        if seg.duration <= 0.0 {
            continue;
        }
        let drive = ProductDrive::new(
            n,
            schedule.params(),
            seg.frequency,
            seg.phase,
            seg.amplitude,
            drive_weights,
        )?;
        let scale = drive.angular_scale().max(1.0 / seg.duration);
        let period = std::f64::consts::TAU / scale;
        let windows = config.samples_per_segment;
        for w in 1..=windows {
            let tau0 = seg.duration * (w - 1) as f64 / windows as f64;
            let tau1 = if w == windows { seg.duration } else { seg.duration * w as f64 / windows as f64 };
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
                        &drive, tau0, tau1, &mut psi, &mut h_carry, &opts, &mut ws,
                    )?;
                }
                Method::Fixed => {
                    let step = config.max_step.unwrap_or(period / 20.0);
                    steps += ode::integrate_fixed(&drive, tau0, tau1, step, &mut psi, &mut ws);
                }
            }
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            norm_drift = norm_drift.max((norm - 1.0).abs());
            times.push(t_global + tau1);
            states.push(FullState::from_raw(n, psi.clone()));
        }
        t_global += seg.duration;
    }

    Ok(FullSpaceRun {
        final_state: FullState::from_raw(n, psi),
        times,
        states,
        converged: norm_drift <= config.norm_tol,
        norm_drift,
        steps,
    })
}

/// Runs the schedule both ways — ladder model and full product basis from
/// the shared ground state — and reports the largest amplitude difference
/// between the two, checked at every sampled time along the trajectory
/// (the full-space result is projected into the ladder basis first).
pub fn compare_full_and_ladder(schedule: &PulseSchedule, config: &IntegratorConfig) -> Result<f64> {
    let n = schedule.n_qubits();
    let ladder = crate::dynamics::integrate(
        schedule,
        &DickeVector::ground(n),
        config,
        DriveFrame::Rotating,
    )?;
    let full = integrate_full(schedule, &FullState::ground(n)?, config, None)?;
    debug_assert_eq!(ladder.states().len(), full.states.len());
    let mut worst = 0.0_f64;
    for (ladder_state, full_state) in ladder.states().iter().zip(&full.states) {
        let projected = project_to_ladder(full_state)?;
        for (a, b) in ladder_state.iter().zip(&projected.amplitudes) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Peak sampled population outside the symmetric ladder when the ground
/// state is driven with the given per-qubit weights (normalized against each
/// sample's norm, so integrator drift does not masquerade as leakage).
pub fn symmetric_subspace_leak(
    schedule: &PulseSchedule,
    config: &IntegratorConfig,
    drive_weights: Option<&[f64]>,
) -> Result<f64> {
    let n = schedule.n_qubits();
    let run = integrate_full(schedule, &FullState::ground(n)?, config, drive_weights)?;
    let mut worst = 0.0_f64;
    for state in &run.states {
        let projected = project_to_ladder(state)?;
        worst = worst.max(1.0 - projected.weight / state.norm_sqr());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::collective_matrices;
    use crate::pulse::{compile, random_target, TargetState};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn quick_config() -> IntegratorConfig {
        IntegratorConfig { samples_per_segment: 4, ..Default::default() }
    }

    fn test_params(eps_over_lambda: f64) -> PhysicalParams {
        let g = TAU * 25e3;
        let lambda = g / 10.0;
        PhysicalParams::new(
            TAU * 5e6,
            lambda,
            lambda * eps_over_lambda,
            g,
            10.0 * g,
            3e-2,
            1e-3,
            4,
        )
        .unwrap()
    }

    /// Collective (uniform-weight) raising operator applied by bit moves.
    fn apply_s_plus(n: usize, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        for (b, &a) in psi.iter().enumerate() {
            for i in 0..n {
                if b & (1 << i) == 0 {
                    out[b | (1 << i)] += a;
                }
            }
        }
        out
    }

    #[test]
    fn isometry_columns_are_orthonormal() {
        for n in [1, 3, 5, 8] {
            let v = dicke_isometry(n).unwrap();
            for a in 0..=n {
                for b in 0..=n {
                    let dot: C64 = (0..1 << n).map(|r| v[[r, a]].conj() * v[[r, b]]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - expect).norm() < 1e-12, "n={n} ({a},{b}): {dot}");
                }
            }
        }
    }

    #[test]
    fn conjugated_raising_operator_matches_ladder_matrix() {
        for n in [2, 3, 6, PRODUCT_BASIS_LIMIT] {
            let v = dicke_isometry(n).unwrap();
            let ops = collective_matrices(n).unwrap();
            let dim = 1 << n;
            for k in 0..=n {
                let col: Vec<C64> = (0..dim).map(|r| v[[r, k]]).collect();
                let raised = apply_s_plus(n, &col);
                for kp in 0..=n {
                    let got: C64 = (0..dim).map(|r| v[[r, kp]].conj() * raised[r]).sum();
                    let want = ops.s_plus[[kp, k]];
                    assert!((got - want).norm() < 1e-10, "n={n} ⟨{kp}|S⁺|{k}⟩: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn subspace_projector_is_idempotent_with_rank_n_plus_one() {
        for n in [2, 4, 8] {
            let v = dicke_isometry(n).unwrap();
            let dim = 1 << n;
            let mut p = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
            for r in 0..dim {
                for c in 0..dim {
                    for k in 0..=n {
                        p[[r, c]] += v[[r, k]] * v[[c, k]].conj();
                    }
                }
            }
            let mut trace = C64::new(0.0, 0.0);
            let mut worst = 0.0_f64;
            for r in 0..dim {
                trace += p[[r, r]];
                for c in 0..dim {
                    let mut sq = C64::new(0.0, 0.0);
                    for m in 0..dim {
                        sq += p[[r, m]] * p[[m, c]];
                    }
                    worst = worst.max((sq - p[[r, c]]).norm());
                }
            }
            assert!(worst < 1e-12, "n={n}: ‖P² − P‖ = {worst:e}");
            assert_relative_eq!(trace.re, (n + 1) as f64, epsilon = 1e-10);
            assert!(trace.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dense_and_bit_op_generators_agree() {
        let params = test_params(0.3);
        let mut drive =
            ProductDrive::new(5, &params, params.omega0 + params.lambda, 0.7, params.epsilon, None)
                .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi: Vec<C64> = (0..32)
            .map(|_| {
                C64::new(
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                    rand::Rng::gen_range(&mut rng, -1.0..1.0),
                )
            })
            .collect();
        let mut dense_out = vec![C64::new(0.0, 0.0); 32];
        let mut bit_out = vec![C64::new(0.0, 0.0); 32];
        drive.eval(0.37, &psi, &mut dense_out);
        drive.dense = None;
        drive.eval(0.37, &psi, &mut bit_out);
        let scale = params.lambda;
        for (a, b) in dense_out.iter().zip(&bit_out) {
            assert!((a - b).norm() < 1e-13 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn embedding_the_ladder_ground_state_gives_the_product_ground_state() {
        let full = FullState::from_ladder(&DickeVector::ground(4)).unwrap();
        assert_eq!(full.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(full.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
        let projected = project_to_ladder(&full).unwrap();
        assert_relative_eq!(projected.weight, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn projection_round_trips_arbitrary_ladder_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 5] {
            let target = random_target(n, n, &mut rng).unwrap();
            let state = target.to_state();
            let full = FullState::from_ladder(&state).unwrap();
            let projected = project_to_ladder(&full).unwrap();
            assert_relative_eq!(projected.weight, 1.0, max_relative = 1e-10);
            for (a, b) in state.amplitudes().iter().zip(&projected.amplitudes) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evolved_state_is_invariant_under_qubit_relabeling() {
        let params = test_params(0.1);
        let r = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let schedule = compile(&TargetState::new(4, vec![r, r]).unwrap(), &params).unwrap();
        let run =
            integrate_full(&schedule, &FullState::ground(4).unwrap(), &quick_config(), None)
                .unwrap();
        for perm in [[1, 0, 2, 3], [3, 2, 1, 0], [1, 2, 3, 0]] {
            let permuted = permute_qubits(&run.final_state, &perm).unwrap();
            let worst = permuted
                .amplitudes()
                .iter()
                .zip(run.final_state.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max);
            assert!(worst < 1e-12, "{perm:?}: {worst:e}");
        }
    }

    #[test]
    fn permute_qubits_rejects_non_permutations() {
        let s = FullState::ground(3).unwrap();
        assert!(permute_qubits(&s, &[0, 0, 1]).is_err());
        assert!(permute_qubits(&s, &[0, 1]).is_err());
        assert!(permute_qubits(&s, &[0, 1, 3]).is_err());
    }

    #[test]
    fn full_space_run_reduces_to_the_ladder_result() {
        let params = test_params(0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let target = random_target(3, 2, &mut rng).unwrap();
        let schedule = compile(&target, &params).unwrap();
        let worst = compare_full_and_ladder(&schedule, &quick_config()).unwrap();
        assert!(worst < 1e-7, "amplitude mismatch {worst:e}");
    }

    #[test]
    fn uniform_drive_never_leaves_the_symmetric_subspace() {
        let params = test_params(0.1);
        let r = C64::new(1.0 / 10.0_f64.sqrt(), 0.0);
        let amps = vec![2.0 * r, 2.0 * r, r, r];
        let schedule = compile(&TargetState::new(3, amps).unwrap(), &params).unwrap();
        let leak = symmetric_subspace_leak(&schedule, &quick_config(), None).unwrap();
        assert!(leak.abs() < 1e-9, "symmetric leak {leak:e}");
    }

    #[test]
    fn lopsided_drive_measurably_escapes_the_subspace() {
        // One qubit driven 10% harder. The escape rate scales with ε/λ, so
        // the check runs at a deliberately strong drive.
        let params = test_params(0.5);
        let r = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let schedule = compile(&TargetState::new(3, vec![r, r]).unwrap(), &params).unwrap();
        let weights = [1.1, 1.0, 1.0];
        let leak = symmetric_subspace_leak(&schedule, &quick_config(), Some(&weights)).unwrap();
        assert!(leak > 1e-4, "asymmetric leak only {leak:e}");
        let symmetric = symmetric_subspace_leak(&schedule, &quick_config(), None).unwrap();
        assert!(leak > symmetric * 1e3);
    }

    #[test]
    fn weight_validation() {
        let params = test_params(0.1);
        let r = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let schedule = compile(&TargetState::new(2, vec![r, r]).unwrap(), &params).unwrap();
        let cfg = quick_config();
        assert!(symmetric_subspace_leak(&schedule, &cfg, Some(&[1.0])).is_err());
        assert!(symmetric_subspace_leak(&schedule, &cfg, Some(&[1.0, -1.0])).is_err());
    }
}
