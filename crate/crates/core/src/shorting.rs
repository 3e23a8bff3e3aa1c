//! Block partitions with respect to a pair of projectors, (weak)
//! complementability and the bilateral shorted operator `T_/(M,N)`.
//!
//! `T: C^n -> C^m`, `P_M` acts on the domain, `P_N` on the codomain. With
//! orthonormal bases `Q_M, Q_M⊥, Q_N, Q_N⊥` the corners are
//! `T11 = Q_N* T Q_M`, `T12 = Q_N* T Q_M⊥`, `T21 = Q_N⊥* T Q_M`, `T22 = Q_N⊥* T Q_M⊥`.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::douglas::{solve_reduced, ReducedSolution};
use crate::numkit::random::{random_complex, random_low_rank, random_unitary};
use crate::numkit::subspace::{intersection_basis, null_basis, projector_bases, range_basis, sum_basis, subspace_gap};
use crate::numkit::{svd, LinalgError, Mat, Side, Svd, Tol};

pub use crate::numkit::Proj;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShortingError {
    #[error("system {system} of the weak complementability test has no reduced solution (margin {margin:.3e})")]
    NotWeaklyComplementable { system: usize, margin: f64 },
    #[error("witness does not solve its system: {0}")]
    WitnessInvalid(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<crate::douglas::DouglasError> for ShortingError {
    fn from(e: crate::douglas::DouglasError) -> Self {
        match e {
            crate::douglas::DouglasError::Linalg(l) => l.into(),
            crate::douglas::DouglasError::NotSolvable { margin, .. } => {
                ShortingError::WitnessInvalid(format!("unsolvable system, margin {margin:.3e}"))
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, ShortingError>;

/// Operator decomposed as a 2x2 block matrix in the bases of `M + M⊥` and `N + N⊥`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockOperator {
    #[serde(rename = "T")]
    pub t: Mat,
    #[serde(skip)]
    pub pm: Proj,
    #[serde(skip)]
    pub pn: Proj,
    pub q_m: Mat,
    pub q_m_perp: Mat,
    pub q_n: Mat,
    pub q_n_perp: Mat,
    #[serde(rename = "T11")]
    pub t11: Mat,
    #[serde(rename = "T12")]
    pub t12: Mat,
    #[serde(rename = "T21")]
    pub t21: Mat,
    #[serde(rename = "T22")]
    pub t22: Mat,
}

impl BlockOperator {
    /// `|[Q_N Q_N⊥] [[T11, T12], [T21, T22]] [Q_M Q_M⊥]* - T|`
    pub fn reassembly_residual(&self) -> f64 {
        let left = self.q_n.hstack(&self.q_n_perp);
        let right = self.q_m.hstack(&self.q_m_perp);
        let blocks = Mat::from_blocks(&self.t11, &self.t12, &self.t21, &self.t22);
        (&left.matmul(&blocks).matmul(&right.adjoint()) - &self.t).op_norm()
    }

    /// Lifts an `N x M` block to the ambient operator `Q_N X Q_M*`.
    pub fn embed(&self, core: &Mat) -> Mat {
        self.q_n.matmul(core).matmul(&self.q_m.adjoint())
    }
}

pub fn partition(t: &Mat, pm: &Proj, pn: &Proj, tol: &Tol) -> Result<BlockOperator> {
    if pm.dim() != t.cols() || pn.dim() != t.rows() {
        return Err(LinalgError::ShapeMismatch { left: t.shape(), right: (pn.dim(), pm.dim()) }.into());
    }
    let (q_m, q_m_perp) = projector_bases(pm, tol)?;
    let (q_n, q_n_perp) = projector_bases(pn, tol)?;
    let compress = |qo: &Mat, qi: &Mat| qo.adjoint().matmul(t).matmul(qi);
    Ok(BlockOperator {
        t11: compress(&q_n, &q_m),
        t12: compress(&q_n, &q_m_perp),
        t21: compress(&q_n_perp, &q_m),
        t22: compress(&q_n_perp, &q_m_perp),
        t: t.clone(),
        pm: pm.clone(),
        pn: pn.clone(),
        q_m,
        q_m_perp,
        q_n,
        q_n_perp,
    })
}

/// Outcome of `T22 X = T21`, `T22* Y = T12*` with reduced witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct Complementability {
    pub verdict: bool,
    #[serde(rename = "C")]
    pub c: ReducedSolution,
    #[serde(rename = "D")]
    pub d: ReducedSolution,
}

pub fn is_complementable(b: &BlockOperator, tol: &Tol) -> Result<Complementability> {
    let c = solve_reduced(&b.t22, &b.t21, tol)?;
    let d = solve_reduced(&b.t22.adjoint(), &b.t12.adjoint(), tol)?;
    Ok(Complementability { verdict: c.solvable && d.solvable, c, d })
}

/// Idempotents `P = Q_M Q_M* - Q_M⊥ C Q_M*` and `Q = Q_N Q_N* - Q_N D* Q_N⊥*`.
#[derive(Debug, Clone, Serialize)]
pub struct Idempotents {
    #[serde(rename = "P")]
    pub p: Mat,
    #[serde(rename = "Q")]
    pub q: Mat,
}

/// Residuals of `P^2 = P`, `Q^2 = Q`, `R(P*) = M`, `R(TP) ⊆ N`, `R(Q) = N`, `R((QT)*) ⊆ M`.
#[derive(Debug, Clone, Serialize)]
pub struct IdempotentCheck {
    pub p_idempotent: f64,
    pub q_idempotent: f64,
    pub range_p_adjoint: f64,
    pub range_tp: f64,
    pub range_q: f64,
    pub range_qt_adjoint: f64,
}

impl IdempotentCheck {
    pub fn max(&self) -> f64 {
        [self.p_idempotent, self.q_idempotent, self.range_p_adjoint, self.range_tp, self.range_q, self.range_qt_adjoint]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn complementable_idempotents(b: &BlockOperator, c: &Mat, d: &Mat, tol: &Tol) -> Result<Idempotents> {
    let rc = (&b.t22.matmul(c) - &b.t21).op_norm() / b.t21.op_norm().max(1.0);
    if rc > tol.residual_rel {
        return Err(ShortingError::WitnessInvalid(format!("|T22 C - T21| = {rc:.3e}")));
    }
    let rd = (&b.t22.adjoint().matmul(d) - &b.t12.adjoint()).op_norm() / b.t12.op_norm().max(1.0);
    if rd > tol.residual_rel {
        return Err(ShortingError::WitnessInvalid(format!("|T22* D - T12*| = {rd:.3e}")));
    }
    let p = &b.q_m.matmul(&b.q_m.adjoint()) - &b.q_m_perp.matmul(c).matmul(&b.q_m.adjoint());
    let q = &b.q_n.matmul(&b.q_n.adjoint()) - &b.q_n.matmul(&d.adjoint()).matmul(&b.q_n_perp.adjoint());
    Ok(Idempotents { p, q })
}

pub fn check_idempotents(b: &BlockOperator, w: &Idempotents) -> IdempotentCheck {
    let scale = b.t.op_norm().max(1.0);
    let m_perp = b.pm.complement();
    let n_perp = b.pn.complement();
    let (p, q) = (&w.p, &w.q);
    let p_adj = p.adjoint();
    let qt_adj = q.matmul(&b.t).adjoint();
    // R(P*) = M: R(P*) ⊆ M and P* fixes M.
    let range_p = (m_perp.matrix().matmul(&p_adj)).op_norm().max((&p_adj.matmul(&b.q_m) - &b.q_m).op_norm());
    let range_q = (n_perp.matrix().matmul(q)).op_norm().max((&q.matmul(&b.q_n) - &b.q_n).op_norm());
    IdempotentCheck {
        p_idempotent: (&p.matmul(p) - p).op_norm(),
        q_idempotent: (&q.matmul(q) - q).op_norm(),
        range_p_adjoint: range_p,
        range_tp: n_perp.matrix().matmul(&b.t).matmul(p).op_norm() / scale,
        range_q,
        range_qt_adjoint: m_perp.matrix().matmul(&qt_adj).op_norm() / scale,
    }
}

/// Reduced solutions of the four half-power systems
/// `V E = T21`, `|T22|^½ F = T12*`, `|T22*|^½ Ẽ = T21`, `V* F̃ = T12*`
/// with `V = V_T22`.
#[derive(Debug, Clone, Serialize)]
pub struct WeakComplementData {
    #[serde(rename = "E")]
    pub e: Mat,
    #[serde(rename = "F")]
    pub f: Mat,
    #[serde(rename = "Etilde")]
    pub e_tilde: Mat,
    #[serde(rename = "Ftilde")]
    pub f_tilde: Mat,
    pub residuals: [f64; 4],
    pub margins: [f64; 4],
    pub solvable: [bool; 4],
    pub borderline: [bool; 4],
    pub range_ok: [bool; 4],
    /// `|F̃ - U22 F|` and `|E - U22* Ẽ|` with `U22` the polar factor of `T22`.
    pub polar_relations: [f64; 2],
    /// Systems 2 and 3 were solvable and their solutions determined those of
    /// 1 and 4 through the polar factor, i.e. E and F̃ carried no extra information.
    pub first_and_fourth_redundant: bool,
}

impl WeakComplementData {
    pub fn all_solvable(&self) -> bool {
        self.solvable.iter().all(|&s| s)
    }

    /// `max(|E|, |F|, |Ẽ|, |F̃|)`
    pub fn max_norm(&self) -> f64 {
        [&self.e, &self.f, &self.e_tilde, &self.f_tilde].iter().map(|m| m.op_norm()).fold(0.0, f64::max)
    }
}

pub fn weak_complement_data(b: &BlockOperator, tol: &Tol) -> Result<WeakComplementData> {
    let d22 = svd(&b.t22, tol)?;
    weak_data_from_svd(b, &d22, tol)
}

fn weak_data_from_svd(b: &BlockOperator, d22: &Svd, tol: &Tol) -> Result<WeakComplementData> {
    let v = d22.v_factor();
    let root = d22.abs_power(Side::Right, 0.5);
    let coroot = d22.abs_power(Side::Left, 0.5);
    let t12s = b.t12.adjoint();
    let systems = [
        solve_reduced(&v, &b.t21, tol)?,
        solve_reduced(&root, &t12s, tol)?,
        solve_reduced(&coroot, &b.t21, tol)?,
        solve_reduced(&v.adjoint(), &t12s, tol)?,
    ];
    let u22 = d22.partial_isometry();
    let [e, f, et, ft] = systems.clone().map(|s| s.d);
    let polar_relations = [(&ft - &u22.matmul(&f)).op_norm(), (&e - &u22.adjoint().matmul(&et)).op_norm()];
    let scale = b.t.op_norm().max(1.0).sqrt();
    let first_and_fourth_redundant = systems[1].solvable
        && systems[2].solvable
        && systems[0].solvable
        && systems[3].solvable
        && polar_relations.iter().all(|&r| r <= 1e-9 * scale);
    Ok(WeakComplementData {
        residuals: systems.each_ref().map(|s| s.residual),
        margins: systems.each_ref().map(|s| s.margin),
        solvable: systems.each_ref().map(|s| s.solvable),
        borderline: systems.each_ref().map(|s| s.borderline),
        range_ok: systems.each_ref().map(|s| s.range_ok),
        e,
        f,
        e_tilde: et,
        f_tilde: ft,
        polar_relations,
        first_and_fourth_redundant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Complementable,
    WeaklyComplementable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShortedResult {
    /// `Q_N core Q_M*`, same shape as `T`.
    pub shorted: Mat,
    /// `T11 - (F*E + F̃*Ẽ)/2`
    pub core: Mat,
    /// `T11 - F*E`
    pub core_simplified: Mat,
    /// `|F*E - F̃*Ẽ|`
    pub fe_gap: f64,
    pub witnesses: WeakComplementData,
    pub mode: Mode,
}

/// Bilateral shorted operator; requires all four weak systems to be solvable.
pub fn shorted(b: &BlockOperator, tol: &Tol) -> Result<ShortedResult> {
    let w = weak_complement_data(b, tol)?;
    if let Some(i) = w.solvable.iter().position(|&s| !s) {
        return Err(ShortingError::NotWeaklyComplementable { system: i + 1, margin: w.margins[i] });
    }
    let fe = w.f.adjoint().matmul(&w.e);
    let ft_et = w.f_tilde.adjoint().matmul(&w.e_tilde);
    let fe_gap = (&fe - &ft_et).op_norm();
    let bound = 1e-9 * b.t.op_norm().max(fe.op_norm()).max(1.0);
    if fe_gap > bound {
        return Err(ShortingError::InvariantViolation(format!("|F*E - F~*E~| = {fe_gap:.3e} exceeds {bound:.3e}")));
    }
    let core = &b.t11 - &(&fe + &ft_et).scale(0.5);
    let core_simplified = &b.t11 - &fe;
    let mode = if is_complementable(b, tol)?.verdict { Mode::Complementable } else { Mode::WeaklyComplementable };
    Ok(ShortedResult { shorted: b.embed(&core), core, core_simplified, fe_gap, witnesses: w, mode })
}

/// Range and kernel bookkeeping of a shorted operator.
#[derive(Debug, Clone, Serialize)]
pub struct RangeKernelReport {
    pub rank_t: usize,
    /// `dim(R(T) ∩ N)`
    pub rank_range_cap_n: usize,
    pub rank_shorted: usize,
    pub dim_kernel_shorted: usize,
    /// `dim(M⊥ + N(T))`
    pub dim_kernel_sum: usize,
    /// `R(shorted) = R(T) ∩ N`
    pub range_equal: bool,
    /// `N(shorted) = M⊥ + N(T)`
    pub kernel_equal: bool,
    /// `R(T) ∩ N ⊆ R(shorted) ⊆ R(T) ∩ N` checked as two separate inclusions.
    pub sandwich: bool,
}

/// Ranks of the shorted operator are taken with the absolute cutoff
/// `rank_rel * |T|`, so an exactly vanishing shorted operator has rank 0 even
/// though its computed entries are round-off.
pub fn verify_range_kernel(b: &BlockOperator, s: &ShortedResult, tol: &Tol) -> Result<RangeKernelReport> {
    let t = &b.t;
    let cutoff = tol.rank_rel * t.op_norm();
    let sine = tol.residual_rel;
    let range_t = range_basis(t, tol)?;
    let cap = intersection_basis(&b.q_n, &range_t, sine, tol)?;
    let ds = crate::numkit::svd::svd_abs_cutoff(&s.shorted, cutoff)?;
    let range_s = ds.u.clone();
    let kernel_s = projector_bases(&ds.corange_projector(), tol)?.1;
    let kernel_sum = sum_basis(&b.q_m_perp, &null_basis(t, tol)?, tol)?;
    let equal = |a: &Mat, c: &Mat| a.cols() == c.cols() && (a.cols() == 0 || subspace_gap(a, c) <= sine.sqrt());
    let contains = |big: &Mat, small: &Mat| -> Result<bool> {
        Ok(small.cols() == 0 || intersection_basis(big, small, sine, tol)?.cols() == small.cols())
    };
    let lower = contains(&range_s, &cap)?;
    let upper = contains(&cap, &range_s)?;
    Ok(RangeKernelReport {
        rank_t: range_t.cols(),
        rank_range_cap_n: cap.cols(),
        rank_shorted: range_s.cols(),
        dim_kernel_shorted: kernel_s.cols(),
        dim_kernel_sum: kernel_sum.cols(),
        range_equal: equal(&range_s, &cap),
        kernel_equal: equal(&kernel_s, &kernel_sum),
        sandwich: lower && upper,
    })
}

/// Random `(M,N)`-complementable operator `C^n -> C^m` with generic projectors:
/// `T22` rank-deficient, `T21 = T22 C`, `T12 = D* T22`, `T11 = D* T22 C + K`
/// with `K` of rank one, conjugated by random unitaries.
pub fn random_complementable<R: Rng>(m: usize, n: usize, rng: &mut R) -> (Mat, Proj, Proj) {
    assert!(m >= 2 && n >= 2, "need room for nontrivial blocks");
    let (km, kn) = (n / 2, m / 2);
    let rank22 = (n - km).min(m - kn).saturating_sub(1).max(1);
    let t22 = random_low_rank(m - kn, n - km, rank22, rng);
    let c = random_complex(n - km, km, rng);
    let d = random_complex(m - kn, kn, rng);
    let k = random_low_rank(kn, km, 1, rng);
    let t21 = t22.matmul(&c);
    let t12 = d.adjoint().matmul(&t22);
    let t11 = &d.adjoint().matmul(&t21) + &k;
    let wm = random_unitary(n, rng);
    let wn = random_unitary(m, rng);
    let t = wn.matmul(&Mat::from_blocks(&t11, &t12, &t21, &t22)).matmul(&wm.adjoint());
    let pm = Proj::from_orthonormal(&wm.submatrix(0, 0, n, km));
    let pn = Proj::from_orthonormal(&wn.submatrix(0, 0, m, kn));
    (t, pm, pn)
}

/// `T11 - T12 T22^+ T21`, the Schur-complement shorted operator of a PSD block matrix.
pub fn schur_complement(b: &BlockOperator, tol: &Tol) -> Result<Mat> {
    let pinv = crate::numkit::pseudo_inverse(&b.t22, tol)?;
    Ok(&b.t11 - &b.t12.matmul(&pinv).matmul(&b.t21))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{random_psd, rng};

    fn top(n: usize, k: usize) -> Proj {
        Proj::coordinate(&(0..n).map(|i| i < k).collect::<Vec<_>>())
    }

    #[test]
    fn coordinate_partition_is_sub_blocks() {
        let tol = Tol::default();
        let t = random_complex(4, 4, &mut rng(20));
        let p = top(4, 2);
        let b = partition(&t, &p, &p, &tol).unwrap();
        assert_eq!(b.t11, t.submatrix(0, 0, 2, 2));
        assert_eq!(b.t12, t.submatrix(0, 2, 2, 2));
        assert_eq!(b.t21, t.submatrix(2, 0, 2, 2));
        assert_eq!(b.t22, t.submatrix(2, 2, 2, 2));
    }

    #[test]
    fn identity_projector_degenerates() {
        let tol = Tol::default();
        let t = random_complex(3, 3, &mut rng(21));
        let b = partition(&t, &top(3, 3), &top(3, 3), &tol).unwrap();
        assert_eq!(b.t11, t);
        assert_eq!((b.t12.shape(), b.t21.shape(), b.t22.shape()), ((3, 0), (0, 3), (0, 0)));
        let s = shorted(&b, &tol).unwrap();
        assert!((&s.shorted - &t).op_norm() < 1e-14);
        assert_eq!(s.mode, Mode::Complementable);
    }

    #[test]
    fn reassembly_with_random_projectors() {
        let tol = Tol::default();
        let mut g = rng(22);
        let (t, pm, pn) = random_complementable(5, 7, &mut g);
        let b = partition(&t, &pm, &pn, &tol).unwrap();
        assert!(b.reassembly_residual() <= 1e-10 * t.op_norm().max(1.0));
    }

    #[test]
    fn rejects_non_projector_and_wrong_shape() {
        let tol = Tol::default();
        let t = Mat::identity(2);
        let half = Proj::new(Mat::identity(2)).unwrap();
        assert!(matches!(partition(&t, &top(3, 1), &half, &tol), Err(ShortingError::Linalg(LinalgError::ShapeMismatch { .. }))));
    }

    #[test]
    fn zero_corner_is_not_complementable() {
        let tol = Tol::default();
        let t = Mat::from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let p = top(2, 1);
        let b = partition(&t, &p, &p, &tol).unwrap();
        assert!(!is_complementable(&b, &tol).unwrap().verdict);
        let w = weak_complement_data(&b, &tol).unwrap();
        assert_eq!(w.solvable, [false, true, false, true]);
        assert!(matches!(shorted(&b, &tol), Err(ShortingError::NotWeaklyComplementable { system: 1, .. })));
    }

    #[test]
    fn parallel_block_with_identities() {
        let tol = Tol::default();
        let i = Mat::identity(1);
        let t = Mat::from_blocks(&i, &i, &i, &i.scale(2.0));
        let p = top(2, 1);
        let b = partition(&t, &p, &p, &tol).unwrap();
        let c = is_complementable(&b, &tol).unwrap();
        assert!(c.verdict);
        assert!((c.c.d[(0, 0)].re - 0.5).abs() < 1e-15);
        let w = complementable_idempotents(&b, &c.c.d, &c.d.d, &tol).unwrap();
        assert!((&w.p - &Mat::from_real_rows(&[&[1.0, 0.0], &[-0.5, 0.0]])).max_abs() < 1e-15);
        assert!(check_idempotents(&b, &w).max() <= 1e-12);
        let s = shorted(&b, &tol).unwrap();
        assert!((s.core[(0, 0)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn no_coupling_gives_compression_idempotent() {
        let tol = Tol::default();
        let t = Mat::from_real_diag(&[3.0, 2.0, 1.0]);
        let p = top(3, 1);
        let b = partition(&t, &p, &p, &tol).unwrap();
        let c = is_complementable(&b, &tol).unwrap();
        let w = complementable_idempotents(&b, &c.c.d, &c.d.d, &tol).unwrap();
        assert_eq!(w.p, *p.matrix());
    }

    #[test]
    fn invalid_witness_is_rejected() {
        let tol = Tol::default();
        let i = Mat::identity(1);
        let t = Mat::from_blocks(&i, &i, &i, &i.scale(2.0));
        let p = top(2, 1);
        let b = partition(&t, &p, &p, &tol).unwrap();
        assert!(matches!(complementable_idempotents(&b, &i, &i.scale(0.5), &tol), Err(ShortingError::WitnessInvalid(_))));
    }

    #[test]
    fn invertible_corner_weak_data() {
        let tol = Tol::default();
        let mut g = rng(23);
        let t = random_complex(4, 4, &mut g);
        let p = top(4, 2);
        let b = partition(&t, &p, &p, &tol).unwrap();
        let w = weak_complement_data(&b, &tol).unwrap();
        assert!(w.all_solvable() && w.first_and_fourth_redundant);
        let v = crate::polar::v_operator(&b.t22, &tol).unwrap();
        let e = crate::numkit::solve(&v, &b.t21).unwrap();
        assert!((&w.e - &e).op_norm() <= 1e-10 * e.op_norm());
    }

    #[test]
    fn random_complementable_identities() {
        let tol = Tol::default();
        let mut g = rng(24);
        for _ in 0..10 {
            let (t, pm, pn) = random_complementable(6, 5, &mut g);
            let b = partition(&t, &pm, &pn, &tol).unwrap();
            let c = is_complementable(&b, &tol).unwrap();
            assert!(c.verdict);
            let w = complementable_idempotents(&b, &c.c.d, &c.d.d, &tol).unwrap();
            assert!(check_idempotents(&b, &w).max() <= 1e-9 * t.op_norm().max(1.0), "{:?}", check_idempotents(&b, &w));
            let s = shorted(&b, &tol).unwrap();
            assert_eq!(s.mode, Mode::Complementable);
            assert!((&s.core - &s.core_simplified).op_norm() <= 1e-9 * t.op_norm());
            let r = verify_range_kernel(&b, &s, &tol).unwrap();
            assert!(r.range_equal && r.kernel_equal && r.sandwich, "{r:?}");
            assert_eq!(r.rank_shorted, 1);
            let support = pn.matrix().matmul(&s.shorted).matmul(pm.matrix());
            assert!((&support - &s.shorted).op_norm() <= 1e-10 * t.op_norm());
        }
    }

    #[test]
    fn duality() {
        let tol = Tol::default();
        let mut g = rng(25);
        for _ in 0..5 {
            let (t, pm, pn) = random_complementable(5, 6, &mut g);
            let s = shorted(&partition(&t, &pm, &pn, &tol).unwrap(), &tol).unwrap();
            let sd = shorted(&partition(&t.adjoint(), &pn, &pm, &tol).unwrap(), &tol).unwrap();
            assert!((&sd.shorted - &s.shorted.adjoint()).op_norm() <= 1e-9 * t.op_norm());
        }
    }

    #[test]
    fn psd_matches_schur_complement() {
        let tol = Tol::default();
        let mut g = rng(26);
        for rank in [6, 4, 2] {
            let t = random_psd(6, rank, &mut g);
            let p = top(6, 3);
            let b = partition(&t, &p, &p, &tol).unwrap();
            let s = shorted(&b, &tol).unwrap();
            let schur = schur_complement(&b, &tol).unwrap();
            assert!((&s.core - &schur).op_norm() <= 1e-8 * t.op_norm());
        }
    }

    #[test]
    fn identity_operator_compresses() {
        let tol = Tol::default();
        let mut g = rng(27);
        let (_, pm, _) = random_complementable(4, 4, &mut g);
        let t = Mat::identity(4);
        let b = partition(&t, &pm, &pm, &tol).unwrap();
        let s = shorted(&b, &tol).unwrap();
        assert!((&s.shorted - pm.matrix()).op_norm() <= 1e-12);
        let r = verify_range_kernel(&b, &s, &tol).unwrap();
        assert!(r.range_equal && r.kernel_equal);
        assert_eq!(r.rank_shorted, 2);
    }
}
