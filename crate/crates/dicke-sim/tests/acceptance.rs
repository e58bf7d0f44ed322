//! End-to-end acceptance checklist: one test per headline guarantee of the
//! crate, each printing a single `criterion N: PASS/FAIL — …` line with the
//! measured numbers (visible with `--nocapture`, or automatically on
//! failure). Tolerances are pinned as constants below; every check runs the
//! real pipeline (compile → integrate → report), no stored expectations
//! beyond the hand-checked reference numbers.

use std::f64::consts::{PI, TAU};

use dicke_sim::budget::error_budget;
use dicke_sim::cavity::compare_models;
use dicke_sim::dicke::{DickeVector, PhysicalParams};
use dicke_sim::dynamics::{integrate, DriveFrame, IntegratorConfig, Method};
use dicke_sim::fullspace::{
    compare_full_and_ladder, integrate_full, project_to_ladder, FullState,
};
use dicke_sim::pulse::{compile, random_target, simulate_ideal, TargetState};
use dicke_sim::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Closed-form duration of the reference schedule's first segment.
const DURATION_REL_TOL: f64 = 1e-12;
/// Cavity loss rate κ = (g/δ_c)²/T_c at the reference point, in Hz.
const KAPPA_EXPECTED_HZ: f64 = 10.0;
const KAPPA_REL_TOL: f64 = 1e-12;
/// Hand-checked reference arithmetic: T/T_d + Tκ, and the same plus the
/// 0.38e-2 leakage figure it is usually quoted with.
const DECOHERENCE_EXPECTED: f64 = 3.19e-2;
const TOTAL_EXPECTED: f64 = 3.57e-2;
const QUOTED_LEAKAGE: f64 = 0.38e-2;
const BUDGET_REL_TOL: f64 = 5e-3;
/// Order-of-magnitude window for the measured parasitic-level population
/// after the reference schedule (the two analytic readings printed alongside
/// straddle it).
const LEAKAGE_WINDOW: (f64, f64) = (5e-4, 2e-2);
const ROUND_TRIP_INFIDELITY: f64 = 1e-10;
/// Log-log slope of integrator infidelity vs ε/λ (quadratic selectivity).
const SELECTIVITY_SLOPE_BAND: (f64, f64) = (1.6, 2.4);
/// Product-basis oracle: trajectory amplitude agreement and off-ladder
/// population ceiling for symmetry-preserving drives.
const ORACLE_AMPLITUDE_TOL: f64 = 1e-7;
const ORACLE_LEAK_TOL: f64 = 1e-10;
const CONTROL_LEAK_FLOOR: f64 = 1e-4;
/// Photon-population guard: peak ⟨a†a⟩ ≤ 4 (g/δ_c)² during the reference run.
const PHOTON_GUARD: f64 = 4.0;
/// Log-log slope of full-vs-effective disagreement against δ_c.
const DISPERSIVE_SLOPE_BAND: (f64, f64) = (-2.4, -1.6);
const NORM_DRIFT_TOL: f64 = 1e-9;
/// Fixed-step halving on the reference run: 4th-order error ratio 16 ± 4.
const HALVING_RATIO_BAND: (f64, f64) = (12.0, 20.0);
const NAMED_STATE_FIDELITY: f64 = 0.99;

fn reference_params() -> PhysicalParams {
    let g = TAU * 25e3;
    PhysicalParams::dispersive(TAU * 50e9, g / 100.0, g, 10.0 * g, 3e-2, 1e-3, 4).unwrap()
}

/// Equal superposition of the two lowest ladder levels on three qubits.
fn reference_target() -> TargetState {
    let r = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    TargetState::new(3, vec![r, r]).unwrap()
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Least-squares slope of ln(y) against ln(x).
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn l2_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn criterion_1_compiled_duration_matches_closed_form() {
    let params = reference_params();
    let schedule = compile(&reference_target(), &params).unwrap();
    let t1 = schedule.segments()[0].duration;
    let expected = PI / (4.0 * 3.0_f64.sqrt() * params.epsilon);
    let rel = (t1 - expected).abs() / expected;
    let ok = schedule.segments().len() == 1
        && rel <= DURATION_REL_TOL
        && (t1 - 0.29e-3).abs() <= 0.005e-3;
    println!(
        "criterion 1: {} — first segment duration {t1:.6e} s vs π/(4√3 ε) = {expected:.6e} s \
         (rel err {rel:.2e}, rounds to 0.29 ms)",
        verdict(ok)
    );
    assert!(ok, "duration {t1:e} s, closed form {expected:e} s, rel err {rel:e}");
}

#[test]
fn criterion_2_error_budget_reference_arithmetic() {
    let schedule = compile(&reference_target(), &reference_params()).unwrap();
    let budget = error_budget(&schedule, None).unwrap();
    let kappa_ok =
        (budget.kappa - KAPPA_EXPECTED_HZ).abs() <= KAPPA_EXPECTED_HZ * KAPPA_REL_TOL;
    let deco = budget.decoherence_infidelity;
    let deco_ok = (deco - DECOHERENCE_EXPECTED).abs() <= DECOHERENCE_EXPECTED * BUDGET_REL_TOL;
    let total = deco + QUOTED_LEAKAGE;
    let total_ok = (total - TOTAL_EXPECTED).abs() <= TOTAL_EXPECTED * BUDGET_REL_TOL;
    let ok = kappa_ok && deco_ok && total_ok;
    println!(
        "criterion 2: {} — κ = {:.12} Hz (expect {KAPPA_EXPECTED_HZ}), decoherence {deco:.4e} \
         (expect {DECOHERENCE_EXPECTED:.2e}), plus quoted leakage {total:.4e} \
         (expect {TOTAL_EXPECTED:.2e})",
        verdict(ok),
        budget.kappa
    );
    assert!(kappa_ok, "κ = {} Hz", budget.kappa);
    assert!(deco_ok, "decoherence {deco:e} vs {DECOHERENCE_EXPECTED:e}");
    assert!(total_ok, "total {total:e} vs {TOTAL_EXPECTED:e}");
}

#[test]
fn criterion_3_residual_leakage_within_window() {
    let schedule = compile(&reference_target(), &reference_params()).unwrap();
    let run = integrate(
        &schedule,
        &DickeVector::ground(3),
        &IntegratorConfig::default(),
        DriveFrame::Rotating,
    )
    .unwrap();
    let p2 = run.final_populations[2];
    let budget = error_budget(&schedule, Some(p2)).unwrap();
    let window_ok = p2 >= LEAKAGE_WINDOW.0 && p2 <= LEAKAGE_WINDOW.1;
    let drift_ok = run.norm_drift <= NORM_DRIFT_TOL;
    let ok = window_ok && drift_ok;
    println!(
        "criterion 3: {} — measured level-2 population {p2:.3e} ∈ [{:.0e}, {:.0e}]; analytic \
         readings {:.3e} (Δ = 2λ) / {:.3e} (Δ = λ); norm drift {:.1e}",
        verdict(ok),
        LEAKAGE_WINDOW.0,
        LEAKAGE_WINDOW.1,
        budget.leakage_analytic,
        budget.leakage_analytic_alt,
        run.norm_drift
    );
    assert!(window_ok, "population {p2:e} outside window");
    assert!(drift_ok, "norm drift {:e}", run.norm_drift);
}

#[test]
fn criterion_4_compiler_round_trip_fidelity() {
    let params = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 1.0;
    for n in 2..=5 {
        for _ in 0..50 {
            let target = random_target(n, n, &mut rng).unwrap();
            let schedule = compile(&target, &params).unwrap();
            let out = simulate_ideal(&schedule).unwrap();
            let f = dicke_sim::dynamics::fidelity(&out, &target.to_state()).unwrap();
            worst = worst.min(f);
        }
    }
    let ok = worst >= 1.0 - ROUND_TRIP_INFIDELITY;
    println!(
        "criterion 4: {} — 200 random targets (N = 2..5), worst round-trip fidelity \
         1 - {:.2e}",
        verdict(ok),
        1.0 - worst
    );
    assert!(ok, "worst fidelity {worst}");
}

#[test]
fn criterion_5_selectivity_improves_quadratically() {
    let g = TAU * 25e3;
    let lambda = g / 10.0;
    let r = C64::new(1.0 / 3.0_f64.sqrt(), 0.0);
    let target = TargetState::new(3, vec![r, r, r]).unwrap();
    // The infidelity carries an oscillatory O(1) factor (the residual
    // off-resonant rotation ends at a drive-dependent phase: at ε/λ = 1e-2
    // it interferes destructively and sits 3x below the trend), so the
    // quadratic law is fitted through nine points across 1.5 decades rather
    // than aliased through three.
    let ratios = [1e-1, 6.5e-2, 4.4e-2, 3e-2, 2e-2, 1.3e-2, 1e-2, 5.5e-3, 3e-3];
    // Runs lengthen as 1/ε; keep the accumulated drift inside the 1e-9
    // budget with a tighter local tolerance.
    let config = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-13, ..Default::default() };
    let mut infidelities = Vec::new();
    let mut worst_drift = 0.0_f64;
    for ratio in ratios {
        let params =
            PhysicalParams::new(TAU * 50e9, lambda, lambda * ratio, g, 10.0 * g, 3e-2, 1e-3, 4)
                .unwrap();
        let schedule = compile(&target, &params).unwrap();
        let run = integrate(&schedule, &DickeVector::ground(3), &config, DriveFrame::Rotating)
            .unwrap();
        infidelities.push(1.0 - run.fidelity);
        worst_drift = worst_drift.max(run.norm_drift);
    }
    let slope = loglog_slope(&ratios, &infidelities);
    let slope_ok = slope >= SELECTIVITY_SLOPE_BAND.0 && slope <= SELECTIVITY_SLOPE_BAND.1;
    let drift_ok = worst_drift <= NORM_DRIFT_TOL;
    let ok = slope_ok && drift_ok;
    println!(
        "criterion 5: {} — two-segment infidelity from ε/λ = 1e-1 down to 3e-3: \
         {{{:.2e} … {:.2e} … {:.2e}}}, log-log slope {slope:.2} ∈ [{}, {}] over {} points; \
         norm drift {:.1e}",
        verdict(ok),
        infidelities[0],
        infidelities[3],
        infidelities[8],
        SELECTIVITY_SLOPE_BAND.0,
        SELECTIVITY_SLOPE_BAND.1,
        ratios.len(),
        worst_drift
    );
    assert!(slope_ok, "slope {slope}, infidelities {infidelities:?}");
    assert!(drift_ok, "norm drift {worst_drift:e}");
}

#[test]
fn criterion_6_product_basis_oracle_agreement() {
    let params = reference_params();
    let config = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        samples_per_segment: 8,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_amp = 0.0_f64;
    let mut worst_leak = 0.0_f64;
    let mut worst_drift = 0.0_f64;
    let mut runs = 0;
    for (n, count) in [(2usize, 7usize), (3, 7), (4, 6)] {
        for _ in 0..count {
            let target = random_target(n, n, &mut rng).unwrap();
            let schedule = compile(&target, &params).unwrap();
            worst_amp = worst_amp.max(compare_full_and_ladder(&schedule, &config).unwrap());
            let full =
                integrate_full(&schedule, &FullState::ground(n).unwrap(), &config, None).unwrap();
            worst_drift = worst_drift.max(full.norm_drift);
            for state in &full.states {
                let projected = project_to_ladder(state).unwrap();
                worst_leak = worst_leak.max(1.0 - projected.weight / state.norm_sqr());
            }
            runs += 1;
        }
    }
    assert_eq!(runs, 20);

    // Negative control: one qubit coupled 10% harder must be noticed. The
    // escape channel scales with the drive, so this runs at ε/λ = 0.5.
    let g = TAU * 25e3;
    let strong =
        PhysicalParams::new(TAU * 50e9, g / 10.0, g / 20.0, g, 10.0 * g, 3e-2, 1e-3, 4).unwrap();
    let schedule = compile(&reference_target(), &strong).unwrap();
    let control = integrate_full(
        &schedule,
        &FullState::ground(3).unwrap(),
        &config,
        Some(&[1.1, 1.0, 1.0]),
    )
    .unwrap();
    let control_leak = control
        .states
        .iter()
        .map(|s| 1.0 - project_to_ladder(s).unwrap().weight / s.norm_sqr())
        .fold(0.0_f64, f64::max);

    let amp_ok = worst_amp <= ORACLE_AMPLITUDE_TOL;
    let leak_ok = worst_leak <= ORACLE_LEAK_TOL;
    let control_ok = control_leak > CONTROL_LEAK_FLOOR;
    let drift_ok = worst_drift <= NORM_DRIFT_TOL;
    let ok = amp_ok && leak_ok && control_ok && drift_ok;
    println!(
        "criterion 6: {} — 20 schedules (N ∈ {{2,3,4}}): worst trajectory |Δc| {worst_amp:.2e} \
         ≤ {ORACLE_AMPLITUDE_TOL:.0e}, worst off-ladder population {worst_leak:.2e} ≤ \
         {ORACLE_LEAK_TOL:.0e}, asymmetric control {control_leak:.2e} > {CONTROL_LEAK_FLOOR:.0e}; \
         norm drift {worst_drift:.1e}",
        verdict(ok)
    );
    assert!(amp_ok, "worst amplitude difference {worst_amp:e}");
    assert!(leak_ok, "worst off-ladder population {worst_leak:e}");
    assert!(control_ok, "control leak only {control_leak:e}");
    assert!(drift_ok, "norm drift {worst_drift:e}");
}

#[test]
fn criterion_7_dispersive_validity_and_scaling() {
    let g = TAU * 25e3;
    let config = IntegratorConfig::default();
    let multipliers = [5.0, 10.0, 20.0, 40.0];
    let mut detunings = Vec::new();
    let mut disagreements = Vec::new();
    let mut worst_drift = 0.0_f64;
    let mut photon_line = String::new();
    let mut photon_ok = true;
    for mult in multipliers {
        let params =
            PhysicalParams::dispersive(TAU * 50e9, g / 100.0, g, mult * g, 3e-2, 1e-3, 4)
                .unwrap();
        let schedule = compile(&reference_target(), &params).unwrap();
        let report = compare_models(&schedule, &config).unwrap();
        detunings.push(mult);
        disagreements.push(report.disagreement);
        worst_drift = worst_drift.max(report.norm_drift);
        if mult == 10.0 {
            let bound = PHOTON_GUARD * (g / params.delta_c).powi(2);
            photon_ok = report.max_photon_population <= bound;
            photon_line = format!(
                "peak photons {:.3e} ≤ {bound:.1e} (n_max used {})",
                report.max_photon_population, report.n_max_used
            );
        }
    }
    let slope = loglog_slope(&detunings, &disagreements);
    let slope_ok = slope >= DISPERSIVE_SLOPE_BAND.0 && slope <= DISPERSIVE_SLOPE_BAND.1;
    let drift_ok = worst_drift <= NORM_DRIFT_TOL;
    let ok = photon_ok && slope_ok && drift_ok;
    println!(
        "criterion 7: {} — {photon_line}; disagreement at δ_c/g = {{5,10,20,40}}: \
         {{{:.2e}, {:.2e}, {:.2e}, {:.2e}}}, log-log slope {slope:.2} ∈ [{}, {}]; \
         norm drift {:.1e}",
        verdict(ok),
        disagreements[0],
        disagreements[1],
        disagreements[2],
        disagreements[3],
        DISPERSIVE_SLOPE_BAND.0,
        DISPERSIVE_SLOPE_BAND.1,
        worst_drift
    );
    assert!(photon_ok, "{photon_line}");
    assert!(drift_ok, "norm drift {worst_drift:e}");
    // Known red: the elimination error is not pure 1/δ_c² at this drive. The
    // dressed transition frequencies sit ~9 g⁴/δ_c³ below the compiled ones,
    // which at ε = g/100 exceeds the √3 ε Rabi rate for δ_c ≲ 10g and blocks
    // the transfer (0.48 disagreement at 5g), steepening the fitted slope to
    // about -3.6. Raising ε pulls every point onto the 1/δ_c² dressing floor
    // — see cavity::tests::disagreement_at_small_detuning_is_drive_limited.
    assert!(
        slope_ok,
        "disagreement slope {slope} outside [{}, {}]; points {disagreements:?} — the \
         frequency-miss term ~9 g⁴/δ_c³ dominates the dressing loss at this drive strength",
        DISPERSIVE_SLOPE_BAND.0, DISPERSIVE_SLOPE_BAND.1
    );
}

#[test]
fn criterion_8_norm_conservation_and_integrator_order() {
    let schedule = compile(&reference_target(), &reference_params()).unwrap();
    let ground = DickeVector::ground(3);

    let adaptive = integrate(&schedule, &ground, &IntegratorConfig::default(), DriveFrame::Rotating)
        .unwrap();
    let drift_ok = adaptive.norm_drift <= NORM_DRIFT_TOL;

    // Tight adaptive reference, then the same run at fixed steps h and h/2.
    let tight = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        samples_per_segment: 1,
        ..Default::default()
    };
    let reference = integrate(&schedule, &ground, &tight, DriveFrame::Rotating).unwrap();
    let h = schedule.total_duration() / 64.0;
    let mut errors = Vec::new();
    for step in [h, h / 2.0] {
        let config = IntegratorConfig {
            method: Method::Fixed,
            max_step: Some(step),
            samples_per_segment: 1,
            ..Default::default()
        };
        let run = integrate(&schedule, &ground, &config, DriveFrame::Rotating).unwrap();
        errors.push(l2_distance(
            run.final_state.amplitudes(),
            reference.final_state.amplitudes(),
        ));
    }
    let ratio = errors[0] / errors[1];
    let ratio_ok = ratio >= HALVING_RATIO_BAND.0 && ratio <= HALVING_RATIO_BAND.1;
    let ok = drift_ok && ratio_ok;
    println!(
        "criterion 8: {} — adaptive norm drift {:.1e} ≤ {NORM_DRIFT_TOL:.0e}; fixed-step error \
         {:.2e} → {:.2e} on halving, ratio {ratio:.1} ∈ [{}, {}]",
        verdict(ok),
        adaptive.norm_drift,
        errors[0],
        errors[1],
        HALVING_RATIO_BAND.0,
        HALVING_RATIO_BAND.1
    );
    assert!(drift_ok, "norm drift {:e}", adaptive.norm_drift);
    assert!(ratio_ok, "halving ratio {ratio}, errors {errors:?}");
}

#[test]
fn criterion_9_ghz_and_w_targets_reachable() {
    let g = TAU * 25e3;
    let lambda = g / 10.0;
    let params =
        PhysicalParams::new(TAU * 50e9, lambda, lambda * 1e-2, g, 10.0 * g, 3e-2, 1e-3, 4)
            .unwrap();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let half = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let w = TargetState::new(3, vec![zero, one]).unwrap();
    let ghz = TargetState::new(3, vec![half, zero, zero, half]).unwrap();

    // These runs are ~10x longer than the reference schedule (durations scale
    // with 1/ε), so the integrator tolerance is tightened to keep the
    // accumulated norm drift inside the global 1e-9 budget.
    let config = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-13, ..Default::default() };
    let mut fidelities = Vec::new();
    let mut worst_drift = 0.0_f64;
    for target in [&w, &ghz] {
        let schedule = compile(target, &params).unwrap();
        let run = integrate(&schedule, &DickeVector::ground(3), &config, DriveFrame::Rotating)
            .unwrap();
        fidelities.push(run.fidelity);
        worst_drift = worst_drift.max(run.norm_drift);
    }
    let fidelity_ok = fidelities.iter().all(|f| *f >= NAMED_STATE_FIDELITY);
    let drift_ok = worst_drift <= NORM_DRIFT_TOL;
    let ok = fidelity_ok && drift_ok;
    println!(
        "criterion 9: {} — W-state fidelity {:.5}, GHZ-type fidelity {:.5} (both ≥ \
         {NAMED_STATE_FIDELITY}) at ε/λ = 1e-2; norm drift {:.1e}",
        verdict(ok),
        fidelities[0],
        fidelities[1],
        worst_drift
    );
    assert!(fidelity_ok, "fidelities {fidelities:?}");
    assert!(drift_ok, "norm drift {worst_drift:e}");
}
