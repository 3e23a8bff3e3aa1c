//! Dense complex linear-algebra substrate.
//!
//! Everything above this module talks about ranges, closures of ranges and
//! positive operators. Here those notions become rank and eigenvalue
//! decisions taken under an explicit [`Tol`].

pub(crate) mod eig;
pub mod io;
mod mat;
pub mod random;
mod solve;
pub mod subspace;
pub(crate) mod svd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eig::{herm_apply, herm_eig, psd_eig, psd_power, HermEig};
pub use mat::{Mat, C64};
pub use solve::solve;
pub use svd::{absolute_value, pseudo_inverse, range_projector, svd, Side, Svd};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e} below -{threshold:.3e})")]
    NotPsd { eigenvalue: f64, threshold: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {eigenvalue:.3e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("exponent must be positive, got {0}")]
    InvalidExponent(f64),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("not an orthogonal projector: {0}")]
    NotAProjector(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Tolerance policy deciding the numerical surrogates of exact ranges.
///
/// * `rank_rel`: singular value `s_i` counts toward the rank iff `s_i > rank_rel * s_1`.
/// * `residual_rel`: relative residual accepted for equations and inclusions.
/// * `eig_clamp_rel`: eigenvalues of a PSD input with `|l| <= eig_clamp_rel * |A|`
///   are set to zero; more negative ones are an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tol {
    pub rank_rel: f64,
    pub residual_rel: f64,
    pub eig_clamp_rel: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Self { rank_rel: 1e-12, residual_rel: 1e-8, eig_clamp_rel: 1e-10 }
    }
}

impl Tol {
    pub fn new(rank_rel: f64, residual_rel: f64, eig_clamp_rel: f64) -> Result<Self> {
        let tol = Self { rank_rel, residual_rel, eig_clamp_rel };
        tol.validate()?;
        Ok(tol)
    }

    /// Derives the full policy from a single residual tolerance: rank cutoff
    /// `tol * 1e-4`, eigenvalue clamp `tol * 1e-2`.
    pub fn from_residual(residual_rel: f64) -> Result<Self> {
        Self::new(residual_rel * 1e-4, residual_rel, residual_rel * 1e-2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("residual_rel", self.residual_rel),
            ("eig_clamp_rel", self.eig_clamp_rel),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(LinalgError::InvalidTolerance(format!("{name} = {v} not in (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Orthogonal projector (Hermitian idempotent).
#[derive(Debug, Clone, PartialEq)]
pub struct Proj(Mat);

impl Proj {
    /// Accepts `p` if `|P^2 - P| <= 1e-10` and `|P - P*| <= 1e-10`.
    pub fn new(p: Mat) -> Result<Self> {
        if !p.is_square() {
            return Err(LinalgError::NotSquare { rows: p.rows(), cols: p.cols() });
        }
        if !p.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let asym = (&p - &p.adjoint()).op_norm();
        if asym > 1e-10 {
            return Err(LinalgError::NotAProjector(format!("|P - P*| = {asym:.3e}")));
        }
        let idem = (&p.matmul(&p) - &p).op_norm();
        if idem > 1e-10 {
            return Err(LinalgError::NotAProjector(format!("|P^2 - P| = {idem:.3e}")));
        }
        Ok(Self(p))
    }

    pub(crate) fn from_hermitian_unchecked(p: Mat) -> Self {
        Self(p)
    }

    /// Projector onto the span of the orthonormal columns of `basis`.
    pub fn from_orthonormal(basis: &Mat) -> Self {
        Self(basis.matmul(&basis.adjoint()).hermitian_part())
    }

    /// Diagonal coordinate projector selecting the flagged coordinates.
    pub fn coordinate(mask: &[bool]) -> Self {
        Self(Mat::from_real_diag(&mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect::<Vec<_>>()))
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// `I - P`.
    pub fn complement(&self) -> Proj {
        let n = self.dim();
        Proj((&Mat::identity(n) - &self.0).hermitian_part())
    }

    /// Trace rounded to the nearest integer.
    pub fn rank(&self) -> usize {
        self.0.trace().re.round().max(0.0) as usize
    }
}
