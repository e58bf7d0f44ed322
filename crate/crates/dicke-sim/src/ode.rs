//! Complex-vector ODE steppers shared by every model in the crate: a classic
//! fixed-step fourth-order scheme and a Dormand-Prince 5(4) embedded pair
//! with standard proportional step control.
//!
//! The right-hand side is abstracted behind [`Rhs`] so the same steppers
//! drive the `(N+1)`-level ladder, the atoms-plus-mode model, and the `2^N`
//! product-basis oracle without caring how `H ψ` is applied.

use crate::{C64, Error, Result};

/// A time-dependent right-hand side `dy/dt = f(t, y)` on complex vectors.
pub(crate) trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

impl<F: Fn(f64, &[C64], &mut [C64])> Rhs for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        (self.1)(t, y, dy)
    }
}

fn axpy(out: &mut [C64], a: f64, x: &[C64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

/// Scratch buffers reused across steps to keep the steppers allocation-free
/// in the hot loop.
pub(crate) struct Workspace {
    k: Vec<Vec<C64>>,
    stage: Vec<C64>,
    candidate: Vec<C64>,
}

impl Workspace {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            k: (0..7).map(|_| vec![C64::new(0.0, 0.0); dim]).collect(),
            stage: vec![C64::new(0.0, 0.0); dim],
            candidate: vec![C64::new(0.0, 0.0); dim],
        }
    }
}

/// One classic fourth-order step from `t` with size `h`, in place.
pub(crate) fn rk4_step<R: Rhs + ?Sized>(rhs: &R, t: f64, h: f64, y: &mut [C64], ws: &mut Workspace) {
    debug_assert_eq!(rhs.dim(), y.len());
    let (k, stage) = (&mut ws.k, &mut ws.stage);
    rhs.eval(t, y, &mut k[0]);

    stage.copy_from_slice(y);
    axpy(stage, h / 2.0, &k[0]);
    rhs.eval(t + h / 2.0, stage, &mut k[1]);

    stage.copy_from_slice(y);
    axpy(stage, h / 2.0, &k[1]);
    rhs.eval(t + h / 2.0, stage, &mut k[2]);

    stage.copy_from_slice(y);
    axpy(stage, h, &k[2]);
    rhs.eval(t + h, stage, &mut k[3]);

    for i in 0..y.len() {
        y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
}

/// Integrates from `t0` to `t1` with a fixed step; the interval is divided
/// evenly so the endpoint is hit exactly. Returns the number of steps.
pub(crate) fn integrate_fixed<R: Rhs + ?Sized>(
    rhs: &R,
    t0: f64,
    t1: f64,
    step: f64,
    y: &mut [C64],
    ws: &mut Workspace,
) -> usize {
    let span = t1 - t0;
    if span <= 0.0 {
        return 0;
    }
    let n = (span / step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    for i in 0..n {
        rk4_step(rhs, t0 + i as f64 * h, h, y, ws);
    }
    n
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(crate) struct AdaptiveOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Integrates from `t0` to `t1` with embedded 5(4) error control. `h` is the
/// running step estimate, carried across calls so sampling windows do not
/// reset the controller. Returns accepted steps.
pub(crate) fn integrate_adaptive<R: Rhs + ?Sized>(
    rhs: &R,
    t0: f64,
    t1: f64,
    y: &mut Vec<C64>,
    h: &mut f64,
    opts: &AdaptiveOpts,
    ws: &mut Workspace,
) -> Result<usize> {
    debug_assert_eq!(rhs.dim(), y.len());
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(0);
    }
    let min_step = span.max(t1.abs()) * 1e-15;
    let mut t = t0;
    let mut steps = 0usize;
    let mut rejected_in_a_row = 0usize;

    while t < t1 {
        let mut hh = h.min(opts.max_step).min(t1 - t);
        if hh < min_step {
            hh = min_step.min(t1 - t);
        }

        for s in 0..7 {
            ws.stage.copy_from_slice(y);
            for (j, &a) in A[s].iter().enumerate().take(s) {
                if a != 0.0 {
                    // Split borrow: stage vs k[j].
                    let (stage, kj) = (&mut ws.stage, &ws.k[j]);
                    for (o, v) in stage.iter_mut().zip(kj) {
                        *o += hh * a * v;
                    }
                }
            }
            let (ks, stage) = (&mut ws.k[s], &ws.stage);
            rhs.eval(t + C[s] * hh, stage, ks);
        }

        ws.candidate.copy_from_slice(y);
        let mut err_sq = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            let mut y5 = C64::new(0.0, 0.0);
            let mut y4 = C64::new(0.0, 0.0);
            for s in 0..7 {
                y5 += B5[s] * ws.k[s][i];
                y4 += B4[s] * ws.k[s][i];
            }
            let next = yi + hh * y5;
            ws.candidate[i] = next;
            let e = hh * (y5 - y4);
            let scale = opts.abs_tol + opts.rel_tol * yi.norm().max(next.norm());
            let r = e.norm() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / y.len() as f64).sqrt();

        if err <= 1.0 || hh <= min_step * 1.0000001 {
            std::mem::swap(y, &mut ws.candidate);
            t += hh;
            steps += 1;
            rejected_in_a_row = 0;
            let factor = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            *h = (hh * factor).min(opts.max_step);
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(Error::NonConvergence(format!(
                    "step controller stalled at t = {t:.6e} (h = {hh:.3e}, err = {err:.3e})"
                )));
            }
            *h = (hh * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)).max(min_step);
        }
        if steps > 200_000_000 {
            return Err(Error::NonConvergence("step budget exhausted".into()));
        }
    }
    Ok(steps)
}
