//! Range inclusion `R(C) ⊆ R(A)` and reduced solutions of `AX = C`.
//!
//! The reduced solution is the unique solution with range inside `R(A*)`,
//! i.e. the minimum-norm solution `A^+ C`. Insolvability never discards
//! the least-squares candidate: [`solve_reduced`] always returns it together
//! with its margin, and [`reduced_solution`] turns a failed check into an error
//! that still carries the candidate.

use serde::Serialize;
use thiserror::Error;

use crate::numkit::{svd, LinalgError, Mat, Svd, Tol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DouglasError {
    #[error("range inclusion fails: margin {margin:.3e}")]
    NotSolvable { margin: f64, candidate: Box<ReducedSolution> },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, DouglasError>;

/// Outcome of the range-inclusion test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeCheck {
    pub included: bool,
    /// `|(I - P_R(A)) C| / max(|C|, 1)`
    pub margin: f64,
    /// Margin within a factor 10 of `residual_rel` on either side.
    pub borderline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedSolution {
    #[serde(rename = "D")]
    pub d: Mat,
    /// `|AD - C| / max(|C|, 1)`
    pub residual: f64,
    /// `R(D) ⊆ R(A*)` to `residual_rel`.
    pub range_ok: bool,
    pub margin: f64,
    pub solvable: bool,
    pub borderline: bool,
}

impl ReducedSolution {
    pub fn norm(&self) -> f64 {
        self.d.op_norm()
    }
}

pub fn range_included(a: &Mat, c: &Mat, tol: &Tol) -> Result<RangeCheck> {
    check_rows(a, c)?;
    let d = svd(a, tol)?;
    Ok(classify(range_margin(&d, c), tol))
}

/// Least-squares reduced candidate `A^+ C` with all diagnostics, solvable or not.
pub fn solve_reduced(a: &Mat, c: &Mat, tol: &Tol) -> Result<ReducedSolution> {
    check_rows(a, c)?;
    let d = svd(a, tol)?;
    let check = classify(range_margin(&d, c), tol);
    let x = d.pseudo_inverse().matmul(c);
    let scale = c.op_norm().max(1.0);
    let residual = (&a.matmul(&x) - c).op_norm() / scale;
    let off_range = (&x - &d.v.matmul(&d.v.adjoint().matmul(&x))).op_norm();
    Ok(ReducedSolution {
        range_ok: off_range <= tol.residual_rel * x.op_norm(),
        d: x,
        residual,
        margin: check.margin,
        solvable: check.included,
        borderline: check.borderline,
    })
}

/// The reduced solution of `AX = C`, or [`DouglasError::NotSolvable`].
pub fn reduced_solution(a: &Mat, c: &Mat, tol: &Tol) -> Result<ReducedSolution> {
    let s = solve_reduced(a, c, tol)?;
    if s.solvable {
        Ok(s)
    } else {
        Err(DouglasError::NotSolvable { margin: s.margin, candidate: Box::new(s) })
    }
}

fn range_margin(d: &Svd, c: &Mat) -> f64 {
    let projected = d.u.matmul(&d.u.adjoint().matmul(c));
    (c - &projected).op_norm() / c.op_norm().max(1.0)
}

fn classify(margin: f64, tol: &Tol) -> RangeCheck {
    let r = tol.residual_rel;
    RangeCheck { included: margin <= r, margin, borderline: margin > r / 10.0 && margin < r * 10.0 }
}

fn check_rows(a: &Mat, c: &Mat) -> Result<()> {
    if a.rows() != c.rows() {
        return Err(LinalgError::ShapeMismatch { left: a.shape(), right: c.shape() }.into());
    }
    Ok(())
}
