//! Square linear solves by LU with partial pivoting.

use super::mat::{Mat, ZERO};
use super::{LinalgError, Result};

/// Solves `A X = B` for square nonsingular `A`.
pub fn solve(a: &Mat, b: &Mat) -> Result<Mat> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.rows() != b.rows() {
        return Err(LinalgError::ShapeMismatch { left: a.shape(), right: b.shape() });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .expect("non-empty range");
        let p = lu[(pivot, k)];
        if p.norm() <= f64::EPSILON * scale || p == ZERO {
            return Err(LinalgError::Singular);
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            for j in 0..x.cols() {
                let tmp = x[(k, j)];
                x[(k, j)] = x[(pivot, j)];
                x[(pivot, j)] = tmp;
            }
        }
        for i in (k + 1)..n {
            let f = lu[(i, k)] / p;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
            for j in 0..x.cols() {
                let v = x[(k, j)];
                x[(i, j)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let p = lu[(k, k)];
        for j in 0..x.cols() {
            let mut acc = x[(k, j)];
            for i in (k + 1)..n {
                let l = lu[(k, i)];
                if l != ZERO {
                    acc -= l * x[(i, j)];
                }
            }
            x[(k, j)] = acc / p;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{random_complex, rng};

    #[test]
    fn solves_random_system() {
        let mut g = rng(1);
        let a = random_complex(7, 7, &mut g);
        let b = random_complex(7, 3, &mut g);
        let x = solve(&a, &b).unwrap();
        assert!((&a.matmul(&x) - &b).op_norm() < 1e-12 * b.op_norm() * a.op_norm());
    }

    #[test]
    fn singular_is_reported() {
        let a = Mat::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(solve(&a, &Mat::identity(2)), Err(LinalgError::Singular));
    }
}
