//! Parallel sums of positive semidefinite matrices, Hansen's inequality and
//! the equation `A:B = X*AX + (I - X)*B(I - X)`.
//!
//! The canonical route is the shorted top-left corner of `[[A, A], [A, A + B]]`,
//! which needs no invertibility. For positive definite inputs the harmonic
//! formula `(A^-1 + B^-1)^-1` is evaluated as a cross-check.

use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

use crate::douglas::{solve_reduced, DouglasError};
use crate::numkit::random::{random_complex, ProbeRng};
use crate::numkit::{herm_eig, psd_eig, svd, HermEig, LinalgError, Mat, Proj, Tol};
use crate::shorting::{partition, shorted, ShortingError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParallelError {
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Shorting(#[from] ShortingError),
    #[error(transparent)]
    Douglas(#[from] DouglasError),
}

pub type Result<T> = std::result::Result<T, ParallelError>;

/// Regularization levels of the `(A + eps I):(B + eps I)` route.
pub const EPS_GRID: [f64; 2] = [1e-4, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    PdFormula,
    ShortedBlock,
    RegularizedLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularizedPoint {
    pub eps: f64,
    /// `|(A + eps I):(B + eps I) - A:B|`
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelSumResult {
    pub value: Mat,
    pub route: Route,
    /// Largest deviation between the exact routes that were computed
    /// (0 when only the shorted block applies).
    pub route_agreement: f64,
    pub pd_formula_used: bool,
    pub regularized: Vec<RegularizedPoint>,
}

/// `A:B` through the shorted block, cross-checked by the harmonic formula
/// when both arguments are positive definite.
pub fn parallel_sum(a: &Mat, b: &Mat, tol: &Tol) -> Result<ParallelSumResult> {
    let (ea, eb) = check_pair(a, b, tol)?;
    let value = shorted_block(a, b, tol)?;
    let scale = ea.largest_abs().max(eb.largest_abs());
    let mut route_agreement = 0.0;
    let pd_formula_used = is_pd(&ea, tol) && is_pd(&eb, tol);
    if pd_formula_used {
        let pd = harmonic(&ea, &eb, 0.0, tol)?;
        route_agreement = (&pd - &value).op_norm();
        // The inverse route loses accuracy with conditioning; only well-posed
        // instances are held to the agreement bound.
        let cond = condition(&ea) * condition(&eb);
        if cond * tol.residual_rel <= 1.0 && route_agreement > 1e-8 * scale.max(f64::MIN_POSITIVE) {
            return Err(ParallelError::InvariantViolation(format!(
                "parallel-sum routes disagree by {route_agreement:.3e}"
            )));
        }
    }
    let regularized = EPS_GRID
        .iter()
        .map(|&eps| Ok(RegularizedPoint { eps, deviation: (&harmonic(&ea, &eb, eps, tol)? - &value).op_norm() }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParallelSumResult { value, route: Route::ShortedBlock, route_agreement, pd_formula_used, regularized })
}

/// Shorted top-left corner of `[[A, A], [A, A + B]]`, clamped to PSD with the
/// clamp scaled by `max(|A|, |B|)`.
fn shorted_block(a: &Mat, b: &Mat, tol: &Tol) -> Result<Mat> {
    let n = a.rows();
    let t = Mat::from_blocks(a, a, a, &(a + b));
    let m = Proj::coordinate(&(0..2 * n).map(|i| i < n).collect::<Vec<_>>());
    let s = shorted(&partition(&t, &m, &m, tol)?, tol)?;
    let core = s.core.hermitian_part();
    if core.is_empty() || core.max_abs() == 0.0 {
        return Ok(core);
    }
    let scale = a.op_norm().max(b.op_norm());
    let eig = herm_eig(&core, tol)?;
    let clamped = crate::numkit::eig::clamp_psd_spectrum_scaled(&eig.eigenvalues, tol, scale)?;
    Ok(eig.reconstruct_with(&clamped))
}

/// `((A + eps)^-1 + (B + eps)^-1)^-1` from the eigendecompositions of A and B.
fn harmonic(ea: &HermEig, eb: &HermEig, eps: f64, tol: &Tol) -> Result<Mat> {
    let inv = |e: &HermEig| e.reconstruct_with(&e.eigenvalues.iter().map(|l| 1.0 / (l + eps)).collect::<Vec<_>>());
    let sum = &inv(ea) + &inv(eb);
    let es = herm_eig(&sum, tol)?;
    Ok(es.reconstruct_with(&es.eigenvalues.iter().map(|l| 1.0 / l).collect::<Vec<_>>()))
}

fn is_pd(e: &HermEig, tol: &Tol) -> bool {
    let min = e.eigenvalues.last().copied().unwrap_or(0.0);
    min > tol.eig_clamp_rel * e.largest_abs()
}

fn condition(e: &HermEig) -> f64 {
    e.largest_abs() / e.eigenvalues.last().copied().unwrap_or(0.0)
}

fn check_pair(a: &Mat, b: &Mat, tol: &Tol) -> Result<(HermEig, HermEig)> {
    if a.shape() != b.shape() {
        return Err(LinalgError::ShapeMismatch { left: a.shape(), right: b.shape() }.into());
    }
    Ok((psd_eig(a, tol)?, psd_eig(b, tol)?))
}

/// `lambda_min(C*AC + (I - C)*B(I - C) - A:B)`; nonnegative up to round-off.
pub fn hansen_inequality_check(a: &Mat, b: &Mat, c: &Mat, tol: &Tol) -> Result<f64> {
    let ab = parallel_sum(a, b, tol)?.value;
    hansen_gap(a, b, &ab, c, tol)
}

fn hansen_gap(a: &Mat, b: &Mat, ab: &Mat, c: &Mat, tol: &Tol) -> Result<f64> {
    let n = a.rows();
    if c.shape() != (n, n) {
        return Err(LinalgError::ShapeMismatch { left: a.shape(), right: c.shape() }.into());
    }
    let ic = &Mat::identity(n) - c;
    let rhs = &c.adjoint().matmul(a).matmul(c) + &ic.adjoint().matmul(b).matmul(&ic);
    let diff = (&rhs - ab).hermitian_part();
    Ok(herm_eig(&diff, tol)?.eigenvalues.last().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct HansenProbes {
    pub seed: u64,
    pub probes: usize,
    pub min_lambda: f64,
    /// `lambda_min` at `C = (A + B)^+ B`.
    pub lambda_at_optimum: f64,
    /// `|C*AC + (I - C)*B(I - C) - A:B|` at `C = (A + B)^+ B`.
    pub gap_at_optimum: f64,
    /// `-1e-8 (|A| + |B|)`
    pub bound: f64,
    pub holds: bool,
}

/// Hansen's inequality on `probes` seeded random `C`, plus the equality case.
pub fn hansen_probes(a: &Mat, b: &Mat, probes: usize, seed: u64, tol: &Tol) -> Result<HansenProbes> {
    let ab = parallel_sum(a, b, tol)?.value;
    let n = a.rows();
    let mut rng = ProbeRng::seed_from_u64(seed);
    let mut min_lambda = f64::INFINITY;
    for _ in 0..probes {
        let c = random_complex(n, n, &mut rng);
        min_lambda = min_lambda.min(hansen_gap(a, b, &ab, &c, tol)?);
    }
    let x = solve_reduced(&(a + b), b, tol)?.d;
    let lambda_at_optimum = hansen_gap(a, b, &ab, &x, tol)?;
    let gap_at_optimum = (&equation_rhs(a, b, &x) - &ab).op_norm();
    let bound = -1e-8 * (a.op_norm() + b.op_norm());
    Ok(HansenProbes {
        seed,
        probes,
        min_lambda,
        lambda_at_optimum,
        gap_at_optimum,
        bound,
        holds: min_lambda.min(lambda_at_optimum) >= bound,
    })
}

fn equation_rhs(a: &Mat, b: &Mat, x: &Mat) -> Mat {
    let ix = &Mat::identity(a.rows()) - x;
    &x.adjoint().matmul(a).matmul(x) + &ix.adjoint().matmul(b).matmul(&ix)
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma69 {
    /// `lambda_min(Y*Y + (I - Y)* X^-1 (I - Y) - (I + X)^-1)`
    pub lambda_min: f64,
    /// `|Y - (I + X)^-1|`
    pub equality_gap: f64,
    /// `|T|` with `T = (I + X^-1)^(1/2) Y - X^-1 (I + X^-1)^(-1/2)`
    pub factor_norm: f64,
    /// `|(RHS - LHS) - T*T|`
    pub factor_identity_residual: f64,
}

/// `(I + X)^-1 <= Y*Y + (I - Y)* X^-1 (I - Y)` for positive definite `X`,
/// with equality exactly at `Y = (I + X)^-1`.
pub fn lemma_69_check(x: &Mat, y: &Mat, tol: &Tol) -> Result<Lemma69> {
    let ex = herm_eig(x, tol)?;
    let min = ex.eigenvalues.last().copied().unwrap_or(0.0);
    if min.is_nan() || min <= tol.eig_clamp_rel * ex.largest_abs() {
        return Err(LinalgError::NotPositiveDefinite { eigenvalue: min }.into());
    }
    let n = x.rows();
    if y.shape() != (n, n) {
        return Err(LinalgError::ShapeMismatch { left: x.shape(), right: y.shape() }.into());
    }
    let f = |g: fn(f64) -> f64| ex.reconstruct_with(&ex.eigenvalues.iter().map(|&l| g(l)).collect::<Vec<_>>());
    let x_inv = f(|l| 1.0 / l);
    let lhs = f(|l| 1.0 / (1.0 + l));
    let root = f(|l| (1.0 + 1.0 / l).sqrt());
    let inv_root = f(|l| (1.0 + 1.0 / l).powf(-0.5));
    let iy = &Mat::identity(n) - y;
    let rhs = &y.adjoint().matmul(y) + &iy.adjoint().matmul(&x_inv).matmul(&iy);
    let diff = (&rhs - &lhs).hermitian_part();
    let t = &root.matmul(y) - &x_inv.matmul(&inv_root);
    Ok(Lemma69 {
        lambda_min: herm_eig(&diff, tol)?.eigenvalues.last().copied().unwrap_or(0.0),
        equality_gap: (y - &lhs).op_norm(),
        factor_norm: t.op_norm(),
        factor_identity_residual: (&diff - &t.adjoint().matmul(&t)).op_norm(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelEquation {
    #[serde(rename = "X")]
    pub x: Mat,
    pub norm: f64,
    /// `|X*AX + (I - X)*B(I - X) - A:B| / (|A| + |B|)`
    pub residual: f64,
    /// `s_max / s_min` of `A + B` on its range.
    pub cond_on_range: f64,
    pub margin: f64,
}

/// Reduced solution of `(A + B) X = B`, which solves
/// `A:B = X*AX + (I - X)*B(I - X)`.
pub fn solve_parallel_equation(a: &Mat, b: &Mat, tol: &Tol) -> Result<ParallelEquation> {
    check_pair(a, b, tol)?;
    let sum = a + b;
    let sol = crate::douglas::reduced_solution(&sum, b, tol)?;
    let ab = parallel_sum(a, b, tol)?.value;
    let scale = (a.op_norm() + b.op_norm()).max(f64::MIN_POSITIVE);
    let residual = (&equation_rhs(a, b, &sol.d) - &ab).op_norm() / scale;
    if residual > 1e-8 {
        return Err(ParallelError::InvariantViolation(format!("equation residual {residual:.3e}")));
    }
    Ok(ParallelEquation {
        norm: sol.norm(),
        residual,
        cond_on_range: svd(&sum, tol)?.condition_on_range(),
        margin: sol.margin,
        x: sol.d,
    })
}
