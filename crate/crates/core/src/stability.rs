//! Stability conditions, gain thresholds and admissible delay bounds.
//!
//! With `H = L + B` and error state `ε = (x - x0·1, v - v0·1)` the closed
//! loop is `ε' = C ε(t) + E ε(t - r)`. For a fixed topology the Lyapunov
//! solution `P̄` of `P̄H + HᵀP̄ = I` yields the gain threshold and, through
//! the Razumikhin matrix `P = [[kP̄, P̄], [P̄, P̄]]`, the delay bound. For a
//! switched family the same is done with `Φ = [[kI, I], [I, I]]` and the
//! family-wide constants `λ̃`, `μ̃`.

use alloc::vec::Vec;

use libm::sqrt;

use crate::linalg::{
    self, is_positive_definite, max_symmetric_eigenvalue, min_symmetric_eigenvalue,
    LuDecomposition, POSITIVE_STABLE_TOL,
};
use crate::{Error, LeaderTopology, Matrix, Result};

/// Pivot ratio below which the inverse of `P` is flagged as ill-conditioned.
pub const CONDITION_WARN_RATIO: f64 = 1e-10;

/// Norm used in the fixed-topology delay bound.
pub const NORM_CONVENTION: &str = "spectral (induced 2-norm)";

/// `H = L + B`.
pub fn h_matrix(t: &LeaderTopology) -> Matrix {
    &t.graph().laplacian() + &t.leader_matrix()
}

/// Every eigenvalue has real part above [`POSITIVE_STABLE_TOL`].
pub fn is_positive_stable(h: &Matrix) -> Result<bool> {
    let s = linalg::eigenvalues(h)?;
    Ok(s.values.iter().all(|e| e.re > POSITIVE_STABLE_TOL))
}

/// For a balanced graph: whether `H + Hᵀ` is positive definite.
pub fn balanced_definiteness(t: &LeaderTopology) -> Result<bool> {
    if !t.graph().is_balanced() {
        return Err(Error::NotBalanced);
    }
    let h = h_matrix(t);
    is_positive_definite(&(&h + &h.transpose()))
}

/// Block matrices of the error dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    /// `C = [[0, I], [0, -kI]]`.
    pub c: Matrix,
    /// `E = [[0, 0], [-H, 0]]`.
    pub e: Matrix,
    /// `F = C + E`.
    pub f: Matrix,
}

/// Assembles `C`, `E` and `F` for coupling matrix `h` and damping gain `k`.
pub fn system_matrices(h: &Matrix, k: f64) -> Result<SystemMatrices> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    let c = Matrix::block2(&z, &id, &z, &id.scale(-k));
    let e = Matrix::block2(&z, &z, &-h, &z);
    debug_assert!((&e * &e).max_abs() == 0.0);
    let f = &c + &e;
    Ok(SystemMatrices { c, e, f })
}

/// The two readings of a gain threshold. They differ by a factor of two in
/// the ratio term; both are kept and the larger one gates the analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainThreshold {
    /// `μ/(2λ) + 1`.
    pub closed_form: f64,
    /// Fixed topology: `μ̄/λ̄ + 1`. Switched: `μ̃/(2λ̃)`.
    pub alternate: f64,
}

impl GainThreshold {
    /// The larger reading.
    pub fn conservative(&self) -> f64 {
        self.closed_form.max(self.alternate)
    }
}

/// Gain-independent constants of a fixed topology.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedConstants {
    /// `H = L + B`.
    pub h: Matrix,
    /// Solution of `P̄H + HᵀP̄ = I`.
    pub p_bar: Matrix,
    /// `‖P̄H + HᵀP̄ - I‖∞`.
    pub lyapunov_residual: f64,
    /// `μ̄`: largest eigenvalue of `P̄HHᵀP̄`.
    pub mu_bar: f64,
    /// `λ̄`: smallest eigenvalue of `P̄`.
    pub lambda_bar: f64,
    /// Both readings of `k*`.
    pub k_star: GainThreshold,
}

/// `H`, `P̄`, `μ̄`, `λ̄` and `k*` for a topology whose leader is globally
/// reachable.
pub fn fixed_constants(t: &LeaderTopology) -> Result<FixedConstants> {
    if !t.leader_globally_reachable() {
        return Err(Error::LeaderNotReachable);
    }
    let h = h_matrix(t);
    let n = h.rows();
    let p_bar = linalg::solve_lyapunov(&h)?;
    let lyapunov_residual =
        (&(&(&p_bar * &h) + &(&h.transpose() * &p_bar)) - &Matrix::identity(n)).norm_inf();
    let ph = &p_bar * &h;
    let mu_bar = max_symmetric_eigenvalue(&(&ph * &ph.transpose()).symmetrized())?;
    let lambda_bar = min_symmetric_eigenvalue(&p_bar)?;
    let k_star = GainThreshold {
        closed_form: mu_bar / (2.0 * lambda_bar) + 1.0,
        alternate: mu_bar / lambda_bar + 1.0,
    };
    Ok(FixedConstants {
        h,
        p_bar,
        lyapunov_residual,
        mu_bar,
        lambda_bar,
        k_star,
    })
}

/// Every constant of the fixed-topology analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedAnalysis {
    /// `H = L + B`.
    pub h: Matrix,
    /// Solution of `P̄H + HᵀP̄ = I`.
    pub p_bar: Matrix,
    /// `‖P̄H + HᵀP̄ - I‖∞`.
    pub lyapunov_residual: f64,
    /// `μ̄`: largest eigenvalue of `P̄HHᵀP̄`.
    pub mu_bar: f64,
    /// `λ̄`: smallest eigenvalue of `P̄`.
    pub lambda_bar: f64,
    /// Both readings of `k*`.
    pub k_star: GainThreshold,
    /// Gain the constants were evaluated at.
    pub k: f64,
    /// Razumikhin constant.
    pub q: f64,
    /// `Q = [[I, HᵀP̄], [P̄H, 2(k-1)P̄]]`.
    pub q_matrix: Matrix,
    /// Smallest eigenvalue of `Q`.
    pub lambda_min: f64,
    /// Admissible delay bound.
    pub tau: f64,
    /// Inverting `P` hit a small pivot ratio.
    pub ill_conditioned: bool,
}

/// `P = [[kP̄, P̄], [P̄, P̄]]`.
pub fn razumikhin_matrix(p_bar: &Matrix, k: f64) -> Matrix {
    Matrix::block2(&p_bar.scale(k), p_bar, p_bar, p_bar)
}

/// Fixed-topology delay bound
/// `λ_min / (‖P·EC·P⁻¹·(EC)ᵀ·P‖ + q‖P‖)` in the spectral norm.
///
/// Returns the bound and the pivot ratio of the `P` factorization.
pub fn fixed_delay_bound(
    h: &Matrix,
    p_bar: &Matrix,
    k: f64,
    q: f64,
    lambda_min: f64,
) -> Result<(f64, f64)> {
    let sys = system_matrices(h, k)?;
    let p = razumikhin_matrix(p_bar, k);
    let lu = LuDecomposition::new(&p)?;
    let p_inv = lu.inverse()?;
    let ec = &sys.e * &sys.c;
    let m = &(&(&(&p * &ec) * &p_inv) * &ec.transpose()) * &p;
    let denom = linalg::spectral_norm(&m) + q * linalg::spectral_norm(&p);
    Ok((lambda_min / denom, lu.pivot_ratio()))
}

fn check_gains(k: f64, q: f64) -> Result<()> {
    if !(q > 1.0) {
        return Err(Error::InvalidRazumikhin(q));
    }
    if !(k > 1.0) {
        return Err(Error::GainBelowThreshold { k, k_star: 1.0 });
    }
    Ok(())
}

/// Fixed-topology analysis at gain `k` and Razumikhin constant `q`.
pub fn analyze_fixed(t: &LeaderTopology, k: f64, q: f64) -> Result<FixedAnalysis> {
    let c = fixed_constants(t)?;
    check_gains(k, q)?;
    if !(k > c.k_star.conservative()) {
        return Err(Error::GainBelowThreshold {
            k,
            k_star: c.k_star.conservative(),
        });
    }
    let n = c.h.rows();
    let ph = &c.p_bar * &c.h;
    let q_matrix = Matrix::block2(
        &Matrix::identity(n),
        &ph.transpose(),
        &ph,
        &c.p_bar.scale(2.0 * (k - 1.0)),
    )
    .symmetrized();
    if !is_positive_definite(&q_matrix)? {
        return Err(Error::NotPositiveDefinite);
    }
    let lambda_min = min_symmetric_eigenvalue(&q_matrix)?;
    let (tau, ratio) = fixed_delay_bound(&c.h, &c.p_bar, k, q, lambda_min)?;

    Ok(FixedAnalysis {
        h: c.h,
        p_bar: c.p_bar,
        lyapunov_residual: c.lyapunov_residual,
        mu_bar: c.mu_bar,
        lambda_bar: c.lambda_bar,
        k_star: c.k_star,
        k,
        q,
        q_matrix,
        lambda_min,
        tau,
        ill_conditioned: ratio < CONDITION_WARN_RATIO,
    })
}

/// Gain-independent constants of a switched family.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedConstants {
    /// `H_σ` per topology.
    pub h_list: Vec<Matrix>,
    /// `λ̃ = min_σ λ_min(H_σ + H_σᵀ)`.
    pub lambda_tilde: f64,
    /// `μ̃ = max_σ λ_max(H_σ H_σᵀ)`.
    pub mu_tilde: f64,
    /// Both readings of `k*`.
    pub k_star: GainThreshold,
    /// Indices of member graphs that are not balanced.
    pub unbalanced: Vec<usize>,
}

/// `λ̃`, `μ̃` and `k*` for a family whose members share a node count and
/// each have a globally reachable leader. Fails when `λ̃ <= 0`.
pub fn switched_constants(ts: &[LeaderTopology]) -> Result<SwitchedConstants> {
    let first = ts.first().ok_or(Error::Empty)?;
    let n = first.n();
    if let Some(t) = ts.iter().find(|t| t.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.n(),
        });
    }
    if ts.iter().any(|t| !t.leader_globally_reachable()) {
        return Err(Error::LeaderNotReachable);
    }
    let h_list: Vec<Matrix> = ts.iter().map(h_matrix).collect();
    let mut lambda_tilde = f64::INFINITY;
    let mut mu_tilde = f64::NEG_INFINITY;
    for h in &h_list {
        let ht = h.transpose();
        lambda_tilde = lambda_tilde.min(min_symmetric_eigenvalue(&(h + &ht))?);
        mu_tilde = mu_tilde.max(max_symmetric_eigenvalue(&(h * &ht).symmetrized())?);
    }
    if !(lambda_tilde > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let k_star = GainThreshold {
        closed_form: mu_tilde / (2.0 * lambda_tilde) + 1.0,
        alternate: mu_tilde / (2.0 * lambda_tilde),
    };
    let unbalanced = ts
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.graph().is_balanced())
        .map(|(i, _)| i)
        .collect();
    Ok(SwitchedConstants {
        h_list,
        lambda_tilde,
        mu_tilde,
        k_star,
        unbalanced,
    })
}

/// Every constant of the switched-topology analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedAnalysis {
    /// `H_σ` per topology.
    pub h_list: Vec<Matrix>,
    /// `λ̃ = min_σ λ_min(H_σ + H_σᵀ)`.
    pub lambda_tilde: f64,
    /// `μ̃ = max_σ λ_max(H_σ H_σᵀ)`.
    pub mu_tilde: f64,
    /// Both readings of `k*`.
    pub k_star: GainThreshold,
    /// Gain.
    pub k: f64,
    /// Razumikhin constant.
    pub q: f64,
    /// Smallest eigenvalue of each `Q_σ`.
    pub q_min_per_topology: Vec<f64>,
    /// Smallest eigenvalue over all `Q_σ`.
    pub lambda_min: f64,
    /// Admissible delay bound.
    pub tau: f64,
    /// Indices of member graphs that are not balanced.
    pub unbalanced: Vec<usize>,
}

/// `Q_σ = [[H_σᵀ + H_σ, H_σᵀ], [H_σ, 2(k-1)I]]`.
pub fn switched_q_matrix(h: &Matrix, k: f64) -> Matrix {
    let n = h.rows();
    let ht = h.transpose();
    Matrix::block2(
        &(h + &ht),
        &ht,
        h,
        &Matrix::identity(n).scale(2.0 * (k - 1.0)),
    )
    .symmetrized()
}

/// Switched delay bound
/// `λ_min / ((2k/(k-1))·μ̃ + ½·q·(k + 1 + √((k-1)² + 4)))`.
pub fn switched_delay_bound(lambda_min: f64, mu_tilde: f64, k: f64, q: f64) -> f64 {
    let phi_norm = 0.5 * (k + 1.0 + sqrt((k - 1.0) * (k - 1.0) + 4.0));
    lambda_min / (2.0 * k / (k - 1.0) * mu_tilde + q * phi_norm)
}

/// Switched-topology analysis. Unbalanced members are accepted and listed
/// in [`SwitchedAnalysis::unbalanced`].
pub fn analyze_switched(ts: &[LeaderTopology], k: f64, q: f64) -> Result<SwitchedAnalysis> {
    let c = switched_constants(ts)?;
    check_gains(k, q)?;
    if !(k > c.k_star.conservative()) {
        return Err(Error::GainBelowThreshold {
            k,
            k_star: c.k_star.conservative(),
        });
    }
    let q_min_per_topology = c
        .h_list
        .iter()
        .map(|h| min_symmetric_eigenvalue(&switched_q_matrix(h, k)))
        .collect::<Result<Vec<_>>>()?;
    let lambda_min = q_min_per_topology
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let tau = switched_delay_bound(lambda_min, c.mu_tilde, k, q);

    Ok(SwitchedAnalysis {
        h_list: c.h_list,
        lambda_tilde: c.lambda_tilde,
        mu_tilde: c.mu_tilde,
        k_star: c.k_star,
        k,
        q,
        q_min_per_topology,
        lambda_min,
        tau,
        unbalanced: c.unbalanced,
    })
}
