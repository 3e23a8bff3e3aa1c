//! Compact singular value decomposition and the quantities derived from it.
//!
//! Exactly Hermitian inputs are diagonalized directly. Everything else goes
//! through the Hermitian embedding `[[0, T], [T*, 0]]`, whose positive
//! eigenvalues are the singular values of `T` with eigenvectors `(u; v)/sqrt 2`.
//! Working on the embedding avoids squaring the condition number as `T*T` would.

use serde::{Deserialize, Serialize};

use super::eig::jacobi;
use super::mat::Mat;
use super::{Proj, Result, Tol};

/// Which absolute value: `Right` is `|T| = (T*T)^{1/2}`, `Left` is `|T*| = (TT*)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// Compact SVD `T = U diag(s) V*` restricted to the numerical rank.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
    pub rows: usize,
    pub cols: usize,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn largest(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    /// `|T|^p` (right) or `|T*|^p` (left), `p > 0`.
    pub fn abs_power(&self, side: Side, p: f64) -> Mat {
        let w: Vec<f64> = self.s.iter().map(|s| s.powf(p)).collect();
        let basis = match side {
            Side::Right => &self.v,
            Side::Left => &self.u,
        };
        basis.scale_columns(&w).matmul(&basis.adjoint()).hermitian_part()
    }

    /// `U diag(f(s)) V*`.
    pub fn map_singular(&self, f: impl Fn(f64) -> f64) -> Mat {
        let w: Vec<f64> = self.s.iter().map(|&s| f(s)).collect();
        self.u.scale_columns(&w).matmul(&self.v.adjoint())
    }

    /// `V_T = U diag(s^(1/2)) V*`. When both singular bases coincide (PSD
    /// input) this is the square root, returned exactly Hermitian.
    pub fn v_factor(&self) -> Mat {
        if self.u == self.v {
            self.abs_power(Side::Right, 0.5)
        } else {
            self.map_singular(f64::sqrt)
        }
    }

    /// Partial isometry `U V*` of the polar decomposition.
    pub fn partial_isometry(&self) -> Mat {
        self.u.matmul(&self.v.adjoint())
    }

    pub fn pseudo_inverse(&self) -> Mat {
        let w: Vec<f64> = self.s.iter().map(|s| 1.0 / s).collect();
        self.v.scale_columns(&w).matmul(&self.u.adjoint())
    }

    pub fn range_projector(&self) -> Proj {
        Proj::from_hermitian_unchecked(self.u.matmul(&self.u.adjoint()).hermitian_part())
    }

    /// Projector onto the closure of the range of `T*`.
    pub fn corange_projector(&self) -> Proj {
        Proj::from_hermitian_unchecked(self.v.matmul(&self.v.adjoint()).hermitian_part())
    }

    /// `s_max / s_min` over the retained singular values (1 for rank zero).
    pub fn condition_on_range(&self) -> f64 {
        match (self.s.first(), self.s.last()) {
            (Some(&hi), Some(&lo)) => hi / lo,
            _ => 1.0,
        }
    }
}

/// Compact SVD with the relative rank cutoff `rank_rel * s_1`.
pub fn svd(t: &Mat, tol: &Tol) -> Result<Svd> {
    svd_impl(t, |s1| tol.rank_rel * s1)
}

/// Compact SVD keeping singular values above an absolute cutoff.
pub(crate) fn svd_abs_cutoff(t: &Mat, cutoff: f64) -> Result<Svd> {
    svd_impl(t, |_| cutoff)
}

fn svd_impl(t: &Mat, cutoff: impl Fn(f64) -> f64) -> Result<Svd> {
    if !t.is_finite() {
        return Err(super::LinalgError::NonFinite);
    }
    let (m, n) = t.shape();
    if t.is_empty() {
        return Ok(Svd { u: Mat::zeros(m, 0), s: vec![], v: Mat::zeros(n, 0), rows: m, cols: n });
    }
    if t.is_hermitian_exact() {
        return Ok(hermitian_svd(t, cutoff));
    }
    let zero_m = Mat::zeros(m, m);
    let zero_n = Mat::zeros(n, n);
    let embed = Mat::from_blocks(&zero_m, t, &t.adjoint(), &zero_n);
    let (values, vectors) = jacobi(embed, true);
    let vectors = vectors.expect("vectors requested");
    let s1 = values.first().copied().unwrap_or(0.0).max(0.0);
    let cut = cutoff(s1);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > cut && values[i] > 0.0).collect();
    let r = keep.len();
    let mut u = Mat::zeros(m, r);
    let mut v = Mat::zeros(n, r);
    let mut s = Vec::with_capacity(r);
    for (col, &i) in keep.iter().enumerate() {
        s.push(values[i]);
        let nu = (0..m).map(|k| vectors[(k, i)].norm_sqr()).sum::<f64>().sqrt();
        let nv = (0..n).map(|k| vectors[(m + k, i)].norm_sqr()).sum::<f64>().sqrt();
        for k in 0..m {
            u[(k, col)] = vectors[(k, i)] / nu;
        }
        for k in 0..n {
            v[(k, col)] = vectors[(m + k, i)] / nv;
        }
    }
    Ok(Svd { u, s, v, rows: m, cols: n })
}

fn hermitian_svd(t: &Mat, cutoff: impl Fn(f64) -> f64) -> Svd {
    let n = t.rows();
    let (values, vectors) = jacobi(t.clone(), true);
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].abs().total_cmp(&values[i].abs()));
    let s1 = order.first().map_or(0.0, |&i| values[i].abs());
    let cut = cutoff(s1);
    let keep: Vec<usize> = order.into_iter().filter(|&i| values[i].abs() > cut).collect();
    let v = vectors.select_columns(&keep);
    let signs: Vec<f64> = keep.iter().map(|&i| values[i].signum()).collect();
    let u = v.scale_columns(&signs);
    let s = keep.iter().map(|&i| values[i].abs()).collect();
    Svd { u, s, v, rows: n, cols: n }
}

/// `|T|` or `|T*|` computed from the singular value decomposition.
pub fn absolute_value(t: &Mat, side: Side, tol: &Tol) -> Result<Mat> {
    Ok(svd(t, tol)?.abs_power(side, 1.0))
}

/// Moore-Penrose pseudo-inverse with the `rank_rel` cutoff.
pub fn pseudo_inverse(t: &Mat, tol: &Tol) -> Result<Mat> {
    Ok(svd(t, tol)?.pseudo_inverse())
}

/// Orthogonal projector onto the numerical range of `T`.
pub fn range_projector(t: &Mat, tol: &Tol) -> Result<Proj> {
    Ok(svd(t, tol)?.range_projector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{random_complex, random_low_rank, random_unitary, rng};

    fn penrose_residuals(t: &Mat, p: &Mat) -> [f64; 4] {
        let tp = t.matmul(p);
        let pt = p.matmul(t);
        [
            (&tp.matmul(t) - t).op_norm(),
            (&pt.matmul(p) - p).op_norm(),
            (&tp.adjoint() - &tp).op_norm(),
            (&pt.adjoint() - &pt).op_norm(),
        ]
    }

    #[test]
    fn pinv_examples() {
        let tol = Tol::default();
        let p = pseudo_inverse(&Mat::from_real_diag(&[2.0, 0.0]), &tol).unwrap();
        assert_eq!(p, Mat::from_real_diag(&[0.5, 0.0]));
        let col = Mat::from_real_rows(&[&[1.0], &[1.0]]);
        let p = pseudo_inverse(&col, &tol).unwrap();
        let expect = Mat::from_real_rows(&[&[0.5, 0.5]]);
        assert!((&p - &expect).op_norm() < 1e-15);
    }

    #[test]
    fn pinv_penrose_rank_deficient() {
        let tol = Tol::default();
        let mut g = rng(3);
        for _ in 0..5 {
            let t = random_low_rank(6, 4, 2, &mut g);
            let p = pseudo_inverse(&t, &tol).unwrap();
            for r in penrose_residuals(&t, &p) {
                assert!(r <= 1e-10, "penrose residual {r}");
            }
        }
    }

    #[test]
    fn singular_values_match_gram_spectrum() {
        let tol = Tol::default();
        let mut g = rng(5);
        let t = random_complex(5, 3, &mut g);
        let d = svd(&t, &tol).unwrap();
        let gram = crate::numkit::herm_eig(&t.adjoint().matmul(&t), &tol).unwrap();
        for (s, l) in d.s.iter().zip(&gram.eigenvalues) {
            assert!((s * s - l).abs() < 1e-12 * gram.eigenvalues[0]);
        }
        let back = d.map_singular(|s| s);
        assert!((&back - &t).op_norm() < 1e-13 * d.largest());
    }

    #[test]
    fn absolute_value_examples() {
        let tol = Tol::default();
        let t = Mat::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!((&absolute_value(&t, Side::Right, &tol).unwrap() - &Mat::from_real_diag(&[1.0, 0.0])).max_abs() < 1e-15);
        assert!((&absolute_value(&t, Side::Left, &tol).unwrap() - &Mat::from_real_diag(&[0.0, 1.0])).max_abs() < 1e-15);
        let three = Mat::identity(3).scale(3.0);
        assert!((&absolute_value(&three, Side::Right, &tol).unwrap() - &three).max_abs() < 1e-15);
    }

    #[test]
    fn range_projector_tolerance_policy() {
        let tol = Tol::default();
        let p = range_projector(&Mat::from_real_diag(&[1.0, 1e-15]), &tol).unwrap();
        assert_eq!(p.matrix(), &Mat::from_real_diag(&[1.0, 0.0]));
    }

    #[test]
    fn range_projector_regularized_limit() {
        let tol = Tol::default();
        let mut g = rng(9);
        let u = random_unitary(6, &mut g);
        let t = u.scale_columns(&[2.0, 0.5, 0.01, 0.0, 0.0, 0.0]).matmul(&u.adjoint()).hermitian_part();
        let p = range_projector(&t, &tol).unwrap();
        let eps = 1e-6 * t.op_norm();
        let reg = crate::numkit::herm_apply(&t, &tol, |l| l / (l + eps)).unwrap();
        assert!((&reg - p.matrix()).op_norm() <= 0.01);
    }
}
