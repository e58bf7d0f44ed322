//! The symmetric ladder: basis bookkeeping, collective operators, level
//! shifts, and the physical parameter set.
//!
//! `N` identical qubits span a collective spin `J = N/2`. The symmetric
//! (maximal-`J`) multiplet is the `(N + 1)`-dimensional ladder
//! `|J, -J + k⟩`, `k = 0..=N`, where `k` counts shared excitations; `k = 0`
//! is all qubits in the ground state. Everything in this crate indexes that
//! ladder by the integer pair `(n_qubits, k)` so half-integer spin labels
//! never appear in code.
//!
//! Two pieces of structure make the ladder controllable:
//!
//! - the exchange term `λ S⁺S⁻` shifts level `k` by `α_k = k(N - k + 1) λ`,
//!   so consecutive transition frequencies differ by `2λ` and each step can
//!   be addressed individually;
//! - the collective raising operator connects `k → k + 1` with matrix
//!   element `√((N - k)(k + 1))`, which sets the per-step Rabi rate under a
//!   uniform drive of strength `ε`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::{C64, Error, Result};

/// Largest qubit count for which product-basis (`2^N`) expansions are built.
pub const PRODUCT_BASIS_LIMIT: usize = 12;

/// Norm tolerance for states that are labeled normalized.
pub const NORM_TOL: f64 = 1e-9;

/// One rung of the symmetric ladder: `k` collective excitations shared by
/// `n_qubits` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderIndex {
    n_qubits: usize,
    k: usize,
}

impl LadderIndex {
    /// Builds a ladder index, requiring `k <= n_qubits` and `n_qubits >= 1`.
    pub fn new(n_qubits: usize, k: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("n_qubits must be at least 1".into()));
        }
        if k > n_qubits {
            return Err(Error::InvalidLevel { k, n: n_qubits });
        }
        Ok(Self { n_qubits, k })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of collective excitations (0 = all ground).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Matrix element of the collective raising operator,
    /// `⟨k+1| S⁺ |k⟩ = √((N - k)(k + 1))`; zero at the top of the ladder.
    pub fn ladder_up_coeff(&self) -> f64 {
        up_coeff(self.n_qubits, self.k)
    }

    /// Matrix element of the collective lowering operator,
    /// `⟨k-1| S⁻ |k⟩ = √(k (N - k + 1))`; zero at the bottom.
    pub fn ladder_down_coeff(&self) -> f64 {
        down_coeff(self.n_qubits, self.k)
    }

    /// Diagonal energy shift `α_k = k (N - k + 1) λ` produced by the
    /// exchange term `λ S⁺S⁻`. Always zero at `k = 0`.
    pub fn level_shift(&self, lambda: f64) -> f64 {
        level_shift(self.n_qubits, self.k, lambda)
    }

    /// Effective Rabi rate of the `k → k + 1` step under a uniform drive of
    /// strength `epsilon`: `Ω_k = ε √((N - k)(k + 1))`.
    ///
    /// Errors with [`Error::NoTransition`] at the top level `k = N`.
    pub fn step_rabi_rate(&self, epsilon: f64) -> Result<f64> {
        if self.k == self.n_qubits {
            return Err(Error::NoTransition { k: self.k });
        }
        Ok(epsilon * self.ladder_up_coeff())
    }

    /// Angular frequency of the `k → k + 1` transition,
    /// `ω₀ + (N - 2k) λ`. Each step up lowers the frequency by `2λ`.
    ///
    /// Errors with [`Error::NoTransition`] at the top level `k = N`.
    pub fn transition_frequency(&self, omega0: f64, lambda: f64) -> Result<f64> {
        if self.k == self.n_qubits {
            return Err(Error::NoTransition { k: self.k });
        }
        Ok(transition_frequency(self.n_qubits, self.k, omega0, lambda))
    }

    /// Collective `S_z` eigenvalue `k - N/2`, with the convention that the
    /// all-ground state sits at `-N/2`.
    pub fn sz_eigenvalue(&self) -> f64 {
        self.k as f64 - self.n_qubits as f64 / 2.0
    }
}

pub(crate) fn up_coeff(n: usize, k: usize) -> f64 {
    if k >= n {
        return 0.0;
    }
    (((n - k) * (k + 1)) as f64).sqrt()
}

pub(crate) fn down_coeff(n: usize, k: usize) -> f64 {
    if k == 0 || k > n {
        return 0.0;
    }
    ((k * (n - k + 1)) as f64).sqrt()
}

pub(crate) fn level_shift(n: usize, k: usize, lambda: f64) -> f64 {
    (k * (n - k + 1)) as f64 * lambda
}

pub(crate) fn transition_frequency(n: usize, k: usize, omega0: f64, lambda: f64) -> f64 {
    omega0 + (n as f64 - 2.0 * k as f64) * lambda
}

/// A normalized state on the symmetric ladder: amplitudes `c_0..c_N`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DickeVector {
    n_qubits: usize,
    #[serde(with = "crate::serde_c64::vec")]
    amplitudes: Vec<C64>,
}

impl DickeVector {
    /// Builds a state from `N + 1` amplitudes, enforcing unit norm within
    /// [`NORM_TOL`].
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != n_qubits + 1 {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: n_qubits + 1,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq, tol: NORM_TOL });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// The all-ground state `k = 0`.
    pub fn ground(n_qubits: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); n_qubits + 1];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    /// The ladder basis state with `k` excitations.
    pub fn basis_state(idx: LadderIndex) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); idx.n_qubits() + 1];
        amplitudes[idx.k()] = C64::new(1.0, 0.0);
        Self { n_qubits: idx.n_qubits(), amplitudes }
    }

    /// Wraps raw integrator output without a norm check (norm drift is a
    /// reported diagnostic, not an error).
    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), n_qubits + 1);
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|c_k|²` per ladder level.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Dense collective spin operators on the `(N + 1)`-dimensional ladder.
pub struct CollectiveOps {
    pub s_plus: Array2<C64>,
    pub s_minus: Array2<C64>,
    pub s_z: Array2<C64>,
}

/// Builds `S⁺`, `S⁻`, and `S_z` restricted to the symmetric ladder.
///
/// `S⁺` carries the up coefficients on its first subdiagonal-transpose
/// (`⟨k+1|S⁺|k⟩`), `S⁻ = (S⁺)†`, and `S_z` is diagonal with eigenvalues
/// `k - N/2`. They satisfy `[S⁺, S⁻] = 2 S_z` exactly.
pub fn collective_matrices(n_qubits: usize) -> Result<CollectiveOps> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter("n_qubits must be at least 1".into()));
    }
    let dim = n_qubits + 1;
    let zero = C64::new(0.0, 0.0);
    let mut s_plus = Array2::from_elem((dim, dim), zero);
    let mut s_minus = Array2::from_elem((dim, dim), zero);
    let mut s_z = Array2::from_elem((dim, dim), zero);
    for k in 0..dim {
        if k < n_qubits {
            s_plus[[k + 1, k]] = C64::new(up_coeff(n_qubits, k), 0.0);
            s_minus[[k, k + 1]] = C64::new(down_coeff(n_qubits, k + 1), 0.0);
        }
        s_z[[k, k]] = C64::new(k as f64 - n_qubits as f64 / 2.0, 0.0);
    }
    Ok(CollectiveOps { s_plus, s_minus, s_z })
}

/// Expands a ladder basis state in the `2^N` product basis.
///
/// Bit `i` of a basis index set means qubit `i` is excited. Level `k` is the
/// equal-weight superposition of all `C(N, k)` bitstrings of weight `k`, each
/// with amplitude `1/√C(N, k)`.
///
/// Errors with [`Error::CapacityExceeded`] above [`PRODUCT_BASIS_LIMIT`].
pub fn dicke_expansion(idx: LadderIndex) -> Result<Vec<C64>> {
    dicke_expansion_with_limit(idx, PRODUCT_BASIS_LIMIT)
}

/// [`dicke_expansion`] with an explicit capacity bound.
pub fn dicke_expansion_with_limit(idx: LadderIndex, limit: usize) -> Result<Vec<C64>> {
    let n = idx.n_qubits();
    if n > limit {
        return Err(Error::CapacityExceeded { n, max: limit });
    }
    let k = idx.k();
    let amp = C64::new(1.0 / binomial(n, k).sqrt(), 0.0);
    let mut out = vec![C64::new(0.0, 0.0); 1 << n];
    for (b, slot) in out.iter_mut().enumerate() {
        if b.count_ones() as usize == k {
            *slot = amp;
        }
    }
    Ok(out)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Physical operating point shared by the compiler, the integrators, and the
/// error budget. All frequencies and rates are angular (rad/s); times are
/// seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Bare qubit transition frequency `ω₀`.
    pub omega0: f64,
    /// Exchange strength `λ` (the ladder anharmonicity is `2λ`).
    pub lambda: f64,
    /// Classical drive strength `ε`.
    pub epsilon: f64,
    /// Qubit–mode coupling `g` of the cavity realization.
    pub g: f64,
    /// Qubit–mode detuning `δ_c` (mode sits at `ω₀ - δ_c`).
    pub delta_c: f64,
    /// Single-qubit relaxation time `T_r` (seconds).
    pub t_r: f64,
    /// Mode decay time `T_c` (seconds).
    pub t_c: f64,
    /// Photon-number cutoff for the full atoms-plus-mode model.
    pub n_max: usize,
}

/// Ratio `ε/λ` above which step addressing degrades enough to warn.
pub const SELECTIVITY_WARN_RATIO: f64 = 0.1;

impl PhysicalParams {
    /// Builds and validates a parameter set with an explicit exchange
    /// strength `λ`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega0: f64,
        lambda: f64,
        epsilon: f64,
        g: f64,
        delta_c: f64,
        t_r: f64,
        t_c: f64,
        n_max: usize,
    ) -> Result<Self> {
        let p = Self { omega0, lambda, epsilon, g, delta_c, t_r, t_c, n_max };
        p.validate()?;
        Ok(p)
    }

    /// Builds a parameter set with `λ = g²/δ_c`, the exchange strength the
    /// detuned mode mediates when it stays near vacuum.
    pub fn dispersive(
        omega0: f64,
        epsilon: f64,
        g: f64,
        delta_c: f64,
        t_r: f64,
        t_c: f64,
        n_max: usize,
    ) -> Result<Self> {
        if delta_c <= 0.0 || delta_c.is_nan() {
            return Err(Error::InvalidParameter("delta_c must be positive".into()));
        }
        Self::new(omega0, g * g / delta_c, epsilon, g, delta_c, t_r, t_c, n_max)
    }

    /// Checks that every rate and time is finite and strictly positive and
    /// that the photon cutoff is usable.
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("omega0", self.omega0),
            ("lambda", self.lambda),
            ("epsilon", self.epsilon),
            ("g", self.g),
            ("delta_c", self.delta_c),
            ("t_r", self.t_r),
            ("t_c", self.t_c),
        ];
        for (name, value) in positives {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be at least 2, got {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Non-fatal diagnostics: currently a single warning when `ε/λ` exceeds
    /// [`SELECTIVITY_WARN_RATIO`], where the weak-drive step addressing that
    /// the compiler assumes starts to break down.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ratio = self.epsilon / self.lambda;
        if ratio > SELECTIVITY_WARN_RATIO {
            out.push(format!(
                "epsilon/lambda = {ratio:.3} exceeds {SELECTIVITY_WARN_RATIO}; \
                 step addressing degrades as (epsilon/lambda)^2"
            ));
        }
        out
    }
}
