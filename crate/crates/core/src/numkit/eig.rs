//! Cyclic Jacobi eigensolver for Hermitian matrices and spectral functions.
//!
//! Off-diagonal entries are annihilated only when they are not negligible
//! relative to `sqrt(|a_pp a_qq|)`, so on positive definite matrices with a
//! well-conditioned diagonal scaling the small eigenvalues come out with
//! high relative accuracy. Rotations that meet two zero entries are skipped,
//! which keeps structural zeros exact.

use super::mat::{Mat, C64, ZERO};
use super::{LinalgError, Result, Tol};

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct HermEig {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: Mat,
}

impl HermEig {
    /// `V diag(values) V*`, returned exactly Hermitian.
    pub fn reconstruct_with(&self, values: &[f64]) -> Mat {
        let v = &self.eigenvectors;
        v.scale_columns(values).matmul(&v.adjoint()).hermitian_part()
    }

    pub fn largest_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn herm_eig(a: &Mat, tol: &Tol) -> Result<HermEig> {
    check_hermitian(a, tol)?;
    let (values, vectors) = jacobi(a.hermitian_part(), true);
    Ok(HermEig { eigenvalues: values, eigenvectors: vectors.expect("vectors requested") })
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V diag(f(l_i)) V*`.
pub fn herm_apply(a: &Mat, tol: &Tol, f: impl Fn(f64) -> f64) -> Result<Mat> {
    let eig = herm_eig(a, tol)?;
    let values: Vec<f64> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    Ok(eig.reconstruct_with(&values))
}

/// `A^p` for a positive semidefinite `A` and `p > 0`.
///
/// Eigenvalues with `|l| <= eig_clamp_rel * |A|` are treated as zero; an
/// eigenvalue below `-eig_clamp_rel * |A|` is reported as [`LinalgError::NotPsd`].
pub fn psd_power(a: &Mat, p: f64, tol: &Tol) -> Result<Mat> {
    if !p.is_finite() || p <= 0.0 {
        return Err(LinalgError::InvalidExponent(p));
    }
    let eig = herm_eig(a, tol)?;
    let clamped = clamp_psd_spectrum(&eig.eigenvalues, tol)?;
    let values: Vec<f64> = clamped.iter().map(|&l| if l > 0.0 { l.powf(p) } else { 0.0 }).collect();
    Ok(eig.reconstruct_with(&values))
}

/// Eigendecomposition of a PSD matrix with the clamp policy applied to its
/// spectrum, so every returned eigenvalue is nonnegative.
pub fn psd_eig(a: &Mat, tol: &Tol) -> Result<HermEig> {
    let mut eig = herm_eig(a, tol)?;
    eig.eigenvalues = clamp_psd_spectrum(&eig.eigenvalues, tol)?;
    Ok(eig)
}

/// Applies the PSD clamp policy to a descending spectrum.
pub(crate) fn clamp_psd_spectrum(values: &[f64], tol: &Tol) -> Result<Vec<f64>> {
    let scale = values.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    clamp_psd_spectrum_scaled(values, tol, scale)
}

pub(crate) fn clamp_psd_spectrum_scaled(values: &[f64], tol: &Tol, scale: f64) -> Result<Vec<f64>> {
    let threshold = tol.eig_clamp_rel * scale;
    values
        .iter()
        .map(|&l| {
            if l < -threshold {
                Err(LinalgError::NotPsd { eigenvalue: l, threshold })
            } else if l.abs() <= threshold {
                Ok(0.0)
            } else {
                Ok(l)
            }
        })
        .collect()
}

pub(crate) fn check_hermitian(a: &Mat, tol: &Tol) -> Result<()> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    if a.is_hermitian_exact() {
        return Ok(());
    }
    let norm = a.fro_norm();
    let asym = (a - &a.adjoint()).fro_norm();
    if asym > tol.residual_rel * norm {
        return Err(LinalgError::NotHermitian { asymmetry: asym / norm.max(f64::MIN_POSITIVE) });
    }
    Ok(())
}

/// Eigenvalues only, descending. The input must be exactly Hermitian.
pub(crate) fn jacobi_eigenvalues(a: Mat) -> Vec<f64> {
    jacobi(a, false).0
}

/// Cyclic Jacobi on an exactly Hermitian matrix. Returns descending
/// eigenvalues and, if requested, the eigenvector matrix in matching order.
pub(crate) fn jacobi(mut a: Mat, want_vectors: bool) -> (Vec<f64>, Option<Mat>) {
    let n = a.rows();
    debug_assert!(a.is_hermitian_exact());
    let mut v = want_vectors.then(|| Mat::identity(n));
    let floor = f64::EPSILON * f64::EPSILON * a.fro_norm() + f64::MIN_POSITIVE;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == ZERO {
                    continue;
                }
                let g = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if g <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() || g <= floor {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                rotate(&mut a, v.as_mut(), p, q, apq, app, aqq);
            }
        }
        if !rotated {
            break;
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| v.select_columns(&order));
    (values, vectors)
}

fn rotate(a: &mut Mat, v: Option<&mut Mat>, p: usize, q: usize, apq: C64, app: f64, aqq: f64) {
    let n = a.rows();
    let g = apq.norm();
    // Column q is rephased by e^{-i phi} so that the pivot becomes real.
    let phase = apq.conj() / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let s = if theta >= 0.0 { 1.0 } else { -1.0 };
        s / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let data = a.data_mut();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = data[k * n + p];
        let akq = data[k * n + q];
        if akp == ZERO && akq == ZERO {
            continue;
        }
        let akq = akq * phase;
        let new_p = akp * c - akq * s;
        let new_q = akp * s + akq * c;
        data[k * n + p] = new_p;
        data[k * n + q] = new_q;
        data[p * n + k] = new_p.conj();
        data[q * n + k] = new_q.conj();
    }
    data[p * n + p] = C64::new(app - t * g, 0.0);
    data[q * n + q] = C64::new(aqq + t * g, 0.0);
    data[p * n + q] = ZERO;
    data[q * n + p] = ZERO;

    if let Some(v) = v {
        let vd = v.data_mut();
        for k in 0..n {
            let vkp = vd[k * n + p];
            let vkq = vd[k * n + q];
            if vkp == ZERO && vkq == ZERO {
                continue;
            }
            let vkq = vkq * phase;
            vd[k * n + p] = vkp * c - vkq * s;
            vd[k * n + q] = vkp * s + vkq * c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{random_hermitian, random_psd, rng};

    fn unitarity_defect(v: &Mat) -> f64 {
        (&v.adjoint().matmul(v) - &Mat::identity(v.cols())).op_norm()
    }

    #[test]
    fn diagonal_input() {
        let e = herm_eig(&Mat::from_real_diag(&[2.0, 1.0]), &Tol::default()).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        assert_eq!(e.eigenvectors, Mat::identity(2));
    }

    #[test]
    fn swap_matrix() {
        let a = Mat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = herm_eig(&a, &Tol::default()).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = &e.eigenvectors;
        assert!((v[(0, 0)].re - r).abs() < 1e-15 && (v[(1, 0)].re - r).abs() < 1e-15);
        assert!((v[(0, 1)].re - r).abs() < 1e-15 && (v[(1, 1)].re + r).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        let mut g = rng(7);
        for _ in 0..10 {
            let a = random_hermitian(8, &mut g);
            let e = herm_eig(&a, &Tol::default()).unwrap();
            let back = e.reconstruct_with(&e.eigenvalues);
            assert!((&back - &a).op_norm() <= 1e-12 * a.op_norm());
            assert!(unitarity_defect(&e.eigenvectors) <= 1e-12);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = Mat::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(herm_eig(&a, &Tol::default()), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn psd_power_diagonal_and_closed_form() {
        let tol = Tol::default();
        let r = psd_power(&Mat::from_real_diag(&[4.0, 9.0]), 0.5, &tol).unwrap();
        assert_eq!(r, Mat::from_real_diag(&[2.0, 3.0]));

        let a = Mat::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let expect = Mat::from_real_rows(&[&[3.0, 1.0], &[1.0, 2.0]]).scale(1.0 / 5f64.sqrt());
        let r = psd_power(&a, 0.5, &tol).unwrap();
        assert!((&r - &expect).op_norm() < 1e-14);
    }

    #[test]
    fn psd_power_composition() {
        let tol = Tol::default();
        let mut g = rng(11);
        for _ in 0..5 {
            let a = random_psd(6, 6, &mut g);
            let third = psd_power(&a, 1.0 / 3.0, &tol).unwrap();
            let back = psd_power(&third, 3.0, &tol).unwrap();
            assert!((&back - &a).op_norm() <= 1e-10 * a.op_norm());
        }
    }

    #[test]
    fn psd_power_rejects_indefinite() {
        let a = Mat::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(psd_power(&a, 0.5, &Tol::default()), Err(LinalgError::NotPsd { .. })));
        let tiny = Mat::from_real_diag(&[1.0, -1e-13]);
        let r = psd_power(&tiny, 0.5, &Tol::default()).unwrap();
        assert_eq!(r[(1, 1)].re, 0.0);
    }

    #[test]
    fn graded_matrix_small_eigenvalue_is_relatively_accurate() {
        // [[2, t], [t, t^2]] has determinant t^2 and trace 2 + t^2.
        let t = 1.0 / 256.0;
        let a = Mat::from_real_rows(&[&[2.0, t], &[t, t * t]]);
        let e = herm_eig(&a, &Tol::default()).unwrap();
        let tr = 2.0 + t * t;
        let det = t * t;
        let small = det / ((tr + (tr * tr - 4.0 * det).sqrt()) / 2.0);
        assert!((e.eigenvalues[1] - small).abs() <= 1e-14 * small);
    }
}
