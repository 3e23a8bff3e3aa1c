//! Orthonormal bases, intersections, sums and principal angles of subspaces.

use super::eig::jacobi;
use super::mat::{Mat, ZERO};
use super::svd::{svd, svd_abs_cutoff};
use super::{LinalgError, Proj, Result, Tol};

/// Coordinates below this magnitude are ignored when picking the leading
/// coordinate of a basis vector.
const SIGNIFICANT: f64 = 1.490_116_119_384_765_6e-8;

/// Orthonormal bases of `R(P)` and `R(I - P)` from the eigenvectors of `P`.
///
/// Inside each of the two eigenvalue clusters the vectors are ordered by the
/// index of their first significant coordinate (stable, so ties keep solver
/// order), and each vector is rephased to make that coordinate real positive.
/// Eigenvalues farther than `eig_clamp_rel` from both 0 and 1 are rejected.
pub fn projector_bases(p: &Proj, tol: &Tol) -> Result<(Mat, Mat)> {
    let (values, vectors) = jacobi(p.matrix().hermitian_part(), true);
    let vectors = vectors.expect("vectors requested");
    let mut range = Vec::new();
    let mut kernel = Vec::new();
    for (i, &l) in values.iter().enumerate() {
        if (l - 1.0).abs() <= tol.eig_clamp_rel {
            range.push(i);
        } else if l.abs() <= tol.eig_clamp_rel {
            kernel.push(i);
        } else {
            return Err(LinalgError::NotAProjector(format!("eigenvalue {l:.6e} is not near 0 or 1")));
        }
    }
    Ok((canonical_columns(&vectors, &range), canonical_columns(&vectors, &kernel)))
}

fn canonical_columns(vectors: &Mat, cols: &[usize]) -> Mat {
    let n = vectors.rows();
    let lead = |j: usize| (0..n).find(|&i| vectors[(i, j)].norm() > SIGNIFICANT).unwrap_or(n);
    let mut order = cols.to_vec();
    order.sort_by_key(|&j| lead(j));
    let mut out = vectors.select_columns(&order);
    for (c, &j) in order.iter().enumerate() {
        let i = lead(j);
        if i < n {
            let z = out[(i, c)];
            let phase = z.conj() / z.norm();
            for k in 0..n {
                let v = out[(k, c)];
                out[(k, c)] = if v == ZERO { ZERO } else { v * phase };
            }
        }
    }
    out
}

/// Orthonormal basis of the numerical range of `T`.
pub fn range_basis(t: &Mat, tol: &Tol) -> Result<Mat> {
    Ok(svd(t, tol)?.u)
}

/// Orthonormal basis of the numerical null space of `T`.
pub fn null_basis(t: &Mat, tol: &Tol) -> Result<Mat> {
    let d = svd(t, tol)?;
    Ok(projector_bases(&d.corange_projector(), tol)?.1)
}

/// Sines of the principal angles between `span(q1)` and `span(q2)` for
/// orthonormal `q1`, `q2`, ascending, one per column of `q2`.
pub fn principal_sines(q1: &Mat, q2: &Mat) -> Result<Vec<f64>> {
    let k2 = q2.cols();
    let z = residual_against(q1, q2);
    let d = svd_abs_cutoff(&z, 0.0)?;
    let mut sines: Vec<f64> = d.s.iter().take(k2).map(|s| s.min(1.0)).collect();
    sines.resize(k2, 0.0);
    sines.sort_by(f64::total_cmp);
    Ok(sines)
}

/// Smallest principal angle in radians (`pi/2` if either subspace is trivial).
pub fn min_principal_angle(q1: &Mat, q2: &Mat) -> Result<f64> {
    if q1.cols() == 0 || q2.cols() == 0 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let sines = principal_sines(q1, q2)?;
    Ok(sines[0].asin())
}

/// Orthonormal basis of `span(q1) ∩ span(q2)`: directions of `span(q2)` at
/// principal angle with sine at most `sine_tol` from `span(q1)`.
pub fn intersection_basis(q1: &Mat, q2: &Mat, sine_tol: f64, tol: &Tol) -> Result<Mat> {
    let n = q2.rows();
    if q1.cols() == 0 || q2.cols() == 0 {
        return Ok(Mat::zeros(n, 0));
    }
    let z = residual_against(q1, q2);
    let d = svd_abs_cutoff(&z, sine_tol)?;
    let coords = projector_bases(&d.corange_projector(), tol)?.1;
    Ok(q2.matmul(&coords))
}

/// Orthonormal basis of `span(q1) + span(q2)`.
pub fn sum_basis(q1: &Mat, q2: &Mat, tol: &Tol) -> Result<Mat> {
    range_basis(&q1.hstack(q2), tol)
}

/// `|P1 - P2|`, the sine of the largest principal angle when ranks agree.
pub fn subspace_gap(q1: &Mat, q2: &Mat) -> f64 {
    let p1 = q1.matmul(&q1.adjoint());
    let p2 = q2.matmul(&q2.adjoint());
    (&p1 - &p2).op_norm()
}

/// `(I - q1 q1*) q2`.
fn residual_against(q1: &Mat, q2: &Mat) -> Mat {
    q2 - &q1.matmul(&q1.adjoint().matmul(q2))
}
