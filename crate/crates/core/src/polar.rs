//! Classical and generalized polar decompositions and the canonical factor `V_T`.
//!
//! Everything is read off one compact SVD `T = W diag(s) Z*`:
//! `|T|^p = Z s^p Z*`, `|T*|^p = W s^p W*`, and the generalized factor with
//! parameter `alpha` is `U = W s^(1 - alpha) Z*`. On `N(T)` every factor is zero.

use serde::Serialize;
use thiserror::Error;

use crate::numkit::{herm_eig, svd, LinalgError, Mat, Side, Svd, Tol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolarError {
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("iteration index must be at least 1")]
    ZeroIterations,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, PolarError>;

/// `T = U |T|^alpha`; `alpha = 1` is the classical decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct PolarForm {
    #[serde(rename = "U")]
    pub u: Mat,
    #[serde(rename = "absT")]
    pub abs_t: Mat,
    pub alpha: f64,
}

/// Relative residuals of the identities satisfied by a generalized polar factor.
#[derive(Debug, Clone, Serialize)]
pub struct GpolarResiduals {
    /// `|U |T|^a - T|`
    pub factorization: f64,
    /// `|U* |T*|^a - T*|`
    pub adjoint_factorization: f64,
    /// `|U*U - |T|^(2(1-a))|`
    pub gram: f64,
    /// `|UU* - |T*|^(2(1-a))|`
    pub cogram: f64,
    /// `|U |T|^b - |T*|^b U|` for `b` in 1/2, 1, 2
    pub intertwining: [f64; 3],
}

impl GpolarResiduals {
    pub fn max(&self) -> f64 {
        [self.factorization, self.adjoint_factorization, self.gram, self.cogram]
            .into_iter()
            .chain(self.intertwining)
            .fold(0.0, f64::max)
    }
}

/// Relative residuals of the factor `V_T`.
#[derive(Debug, Clone, Serialize)]
pub struct VResiduals {
    /// `|V*V - |T||`
    pub gram: f64,
    /// `|VV* - |T*||`
    pub cogram: f64,
    /// `||T*|^(1/2) V - T|`
    pub reduced_equation: f64,
    /// `||T|^(1/2) V* - T*|`
    pub adjoint_reduced_equation: f64,
    /// `|V |T|^b - |T*|^b V|` for `b` in 1/2, 1, 2
    pub intertwining: [f64; 3],
}

impl VResiduals {
    pub fn max(&self) -> f64 {
        [self.gram, self.cogram, self.reduced_equation, self.adjoint_reduced_equation]
            .into_iter()
            .chain(self.intertwining)
            .fold(0.0, f64::max)
    }
}

pub const BETAS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn polar_decompose(t: &Mat, tol: &Tol) -> Result<PolarForm> {
    let d = svd(t, tol)?;
    Ok(PolarForm { u: d.partial_isometry(), abs_t: d.abs_power(Side::Right, 1.0), alpha: 1.0 })
}

pub fn gpolar(t: &Mat, alpha: f64, tol: &Tol) -> Result<PolarForm> {
    check_alpha(alpha)?;
    let d = svd(t, tol)?;
    Ok(PolarForm { u: d.map_singular(|s| s.powf(1.0 - alpha)), abs_t: d.abs_power(Side::Right, 1.0), alpha })
}

/// `U_n = T (I/n + T*T)^(-1/2) (T*T)^((1-alpha)/2)`.
///
/// A rectangular `T: C^c -> C^r` is first embedded as the square operator
/// `[[0, 0], [T, 0]]` on `C^c + C^r` and the lower-left block of its `U_n` is
/// returned.
pub fn gpolar_iterative(t: &Mat, alpha: f64, n: u64) -> Result<Mat> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(PolarError::ZeroIterations);
    }
    if t.is_square() {
        return iterate_square(t, alpha, n);
    }
    let (r, c) = t.shape();
    let embedded = Mat::from_blocks(&Mat::zeros(c, c), &Mat::zeros(c, r), t, &Mat::zeros(r, r));
    Ok(iterate_square(&embedded, alpha, n)?.submatrix(c, 0, r, c))
}

fn iterate_square(t: &Mat, alpha: f64, n: u64) -> Result<Mat> {
    let gram = t.adjoint().matmul(t);
    let e = herm_eig(&gram.hermitian_part(), &Tol::default())?;
    let inv_n = 1.0 / n as f64;
    let g: Vec<f64> = e
        .eigenvalues
        .iter()
        .map(|&l| {
            let l = l.max(0.0);
            (inv_n + l).powf(-0.5) * l.powf(0.5 * (1.0 - alpha))
        })
        .collect();
    Ok(t.matmul(&e.reconstruct_with(&g)))
}

/// `V_T = |T*|^(1/2) U` with `U` the classical polar factor; equals the
/// generalized factor at `alpha = 1/2`.
pub fn v_operator(t: &Mat, tol: &Tol) -> Result<Mat> {
    Ok(svd(t, tol)?.v_factor())
}

/// `V_T = U_alpha |T|^(alpha - 1/2)` built from a generalized factor with
/// `alpha` in `[1/2, 1)`; agrees with [`v_operator`] for every such `alpha`.
pub fn v_operator_from_gpolar(t: &Mat, alpha: f64, tol: &Tol) -> Result<Mat> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(PolarError::AlphaOutOfRange(alpha));
    }
    let d = svd(t, tol)?;
    let u = d.map_singular(|s| s.powf(1.0 - alpha));
    if alpha == 0.5 {
        return Ok(u);
    }
    Ok(u.matmul(&d.abs_power(Side::Right, alpha - 0.5)))
}

/// Checks every identity of the generalized decomposition for `form`.
pub fn gpolar_residuals(t: &Mat, form: &PolarForm, tol: &Tol) -> Result<GpolarResiduals> {
    let d = svd(t, tol)?;
    let a = form.alpha;
    let u = &form.u;
    let nt = d.largest();
    let rel = |x: f64, scale: f64| x / if scale > 0.0 { scale } else { 1.0 };
    let gram_exp = 2.0 * (1.0 - a);
    let intertwining = BETAS.map(|b| {
        let lhs = u.matmul(&d.abs_power(Side::Right, b));
        let rhs = d.abs_power(Side::Left, b).matmul(u);
        rel((&lhs - &rhs).op_norm(), nt.powf(1.0 - a + b))
    });
    Ok(GpolarResiduals {
        factorization: rel((&u.matmul(&d.abs_power(Side::Right, a)) - t).op_norm(), nt),
        adjoint_factorization: rel((&u.adjoint().matmul(&d.abs_power(Side::Left, a)) - &t.adjoint()).op_norm(), nt),
        gram: rel(gram_difference(&u.adjoint().matmul(u), &d, Side::Right, gram_exp), nt.powf(gram_exp)),
        cogram: rel(gram_difference(&u.matmul(&u.adjoint()), &d, Side::Left, gram_exp), nt.powf(gram_exp)),
        intertwining,
    })
}

/// At `alpha = 1` the Gram matrices are the range projectors.
fn gram_difference(g: &Mat, d: &Svd, side: Side, p: f64) -> f64 {
    let target = if p == 0.0 {
        match side {
            Side::Right => d.corange_projector().into_matrix(),
            Side::Left => d.range_projector().into_matrix(),
        }
    } else {
        d.abs_power(side, p)
    };
    (g - &target).op_norm()
}

pub fn v_residuals(t: &Mat, v: &Mat, tol: &Tol) -> Result<VResiduals> {
    let d = svd(t, tol)?;
    let nt = d.largest();
    let rel = |x: f64, scale: f64| x / if scale > 0.0 { scale } else { 1.0 };
    let intertwining = BETAS.map(|b| {
        let lhs = v.matmul(&d.abs_power(Side::Right, b));
        let rhs = d.abs_power(Side::Left, b).matmul(v);
        rel((&lhs - &rhs).op_norm(), nt.powf(0.5 + b))
    });
    let root_left = d.abs_power(Side::Left, 0.5);
    let root_right = d.abs_power(Side::Right, 0.5);
    Ok(VResiduals {
        gram: rel((&v.adjoint().matmul(v) - &d.abs_power(Side::Right, 1.0)).op_norm(), nt),
        cogram: rel((&v.matmul(&v.adjoint()) - &d.abs_power(Side::Left, 1.0)).op_norm(), nt),
        reduced_equation: rel((&root_left.matmul(v) - t).op_norm(), nt),
        adjoint_reduced_equation: rel((&root_right.matmul(&v.adjoint()) - &t.adjoint()).op_norm(), nt),
        intertwining,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(PolarError::AlphaOutOfRange(alpha))
    }
}
