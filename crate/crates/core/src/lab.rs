//! Finite truncations of the counterexample pair
//! `A0 = [[I, S], [S, S^2]]`, `B0 = [[I, 0], [0, 0]]`, `S = diag(1, 1/2, ..., 1/d)`,
//! and sweeps over the truncation size.
//!
//! Every truncation is harmless on its own: `A0 + B0` is invertible, the parallel
//! sum vanishes, the shorted operator of `[[B0, B0], [B0, A0 + B0]]` vanishes.
//! What diverges is the size of the strong solution `(A0 + B0)^-1 B0`, whose norm
//! is `sqrt(1 + d^2)`, while the weak witnesses `(A0 + B0)^(-1/2) B0` stay at norm 1.
//!
//! All kit matrices come from closed forms; the numerical stack is checked
//! against them, not the other way round.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::douglas::{reduced_solution, DouglasError};
use crate::numkit::subspace::{intersection_basis, min_principal_angle, range_basis};
use crate::numkit::{psd_power, solve, svd, LinalgError, Mat, Proj, Tol};
use crate::parallel::{parallel_sum, ParallelError};
use crate::shorting::{partition, shorted, ShortingError};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("truncation dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension list must be nonempty and strictly ascending")]
    BadDimensions,
    #[error("closed form check failed: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Douglas(#[from] DouglasError),
    #[error(transparent)]
    Shorting(#[from] ShortingError),
    #[error(transparent)]
    Parallel(#[from] ParallelError),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

/// `f(t) = sqrt(t^2 + 2t + 2)`
pub fn f(t: f64) -> f64 {
    (t * t + 2.0 * t + 2.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct CounterexampleKit {
    pub d: usize,
    pub s: Mat,
    pub a0: Mat,
    pub b0: Mat,
    /// `(A0 + B0)^(1/2)`
    pub sqrt_ab: Mat,
    /// The unique solution of `(A0 + B0)^(1/2) X = B0`.
    pub x_unique: Mat,
    /// `A0^(1/2)`
    pub a0_sqrt: Mat,
    /// `[[B0, B0], [B0, A0 + B0]]` on `4d` coordinates.
    pub big_t: Mat,
    /// Projector onto the first `2d` coordinates of `big_t`'s space.
    pub pm: Proj,
}

impl CounterexampleKit {
    pub fn a_plus_b(&self) -> Mat {
        &self.a0 + &self.b0
    }
}

/// Builds the kit at truncation `d` from closed forms and checks
/// `sqrtAB^2 = A0 + B0` and `sqrtAB Xunique = B0`.
pub fn make_kit(d: usize) -> Result<CounterexampleKit> {
    if d == 0 {
        return Err(LabError::ZeroDimension);
    }
    let t: Vec<f64> = (1..=d).map(|i| 1.0 / i as f64).collect();
    let diag = |g: &dyn Fn(f64) -> f64| Mat::from_real_diag(&t.iter().map(|&x| g(x)).collect::<Vec<_>>());
    let block = |a: &Mat, b: &Mat, c: &Mat, e: &Mat| Mat::from_blocks(a, b, c, e);
    let zero = Mat::zeros(d, d);
    let id = Mat::identity(d);

    let s = diag(&|x| x);
    let a0 = block(&id, &s, &s, &diag(&|x| x * x));
    let b0 = block(&id, &zero, &zero, &zero);
    let sqrt_ab = block(
        &diag(&|x| (x + 2.0) / f(x)),
        &diag(&|x| x / f(x)),
        &diag(&|x| x / f(x)),
        &diag(&|x| x * (x + 1.0) / f(x)),
    );
    let x_unique = block(&diag(&|x| (x + 1.0) / f(x)), &zero, &diag(&|x| -1.0 / f(x)), &zero);
    let r = |x: f64| (1.0 + x * x).sqrt();
    let a0_sqrt = block(&diag(&|x| 1.0 / r(x)), &diag(&|x| x / r(x)), &diag(&|x| x / r(x)), &diag(&|x| x * x / r(x)));
    let big_t = block(&b0, &b0, &b0, &(&a0 + &b0));
    let pm = Proj::coordinate(&(0..4 * d).map(|i| i < 2 * d).collect::<Vec<_>>());

    let kit = CounterexampleKit { d, s, a0, b0, sqrt_ab, x_unique, a0_sqrt, big_t, pm };
    let apb = kit.a_plus_b();
    let square = (&kit.sqrt_ab.matmul(&kit.sqrt_ab) - &apb).op_norm();
    if square > 1e-10 * apb.op_norm() {
        return Err(LabError::InvariantViolation(format!("|sqrtAB^2 - (A0 + B0)| = {square:.3e}")));
    }
    let eq = (&kit.sqrt_ab.matmul(&kit.x_unique) - &kit.b0).op_norm();
    if eq > 1e-10 {
        return Err(LabError::InvariantViolation(format!("|sqrtAB Xunique - B0| = {eq:.3e}")));
    }
    Ok(kit)
}

/// One line of the divergence sweep. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    /// `|(A0 + B0)^-1 B0|`
    pub norm_strong_solution: f64,
    /// Largest norm among the four weak witnesses of `big_t`.
    pub norm_weak_solutions: f64,
    /// `|A0 : B0|`
    pub norm_parallel_sum: f64,
    /// `|big_t /(M,M)|`
    pub shorted_norm: f64,
    /// Condition number of `A0 + B0`.
    #[serde(rename = "cond_ApB")]
    pub cond_apb: f64,
    /// Smallest principal angle between `R(A0^(1/2))` and `R(B0^(1/2))`.
    pub min_principal_angle: f64,
}

pub fn sweep_row(d: usize, tol: &Tol) -> Result<SweepRow> {
    let kit = make_kit(d)?;
    let apb = kit.a_plus_b();
    let strong = reduced_solution(&apb, &kit.b0, tol)?;
    let big = partition(&kit.big_t, &kit.pm, &kit.pm, tol)?;
    let short = shorted(&big, tol)?;
    let ps = parallel_sum(&kit.a0, &kit.b0, tol)?;
    let angle = min_principal_angle(&range_basis(&kit.a0_sqrt, tol)?, &range_basis(&kit.b0, tol)?)?;
    Ok(SweepRow {
        d,
        norm_strong_solution: strong.norm(),
        norm_weak_solutions: short.witnesses.max_norm(),
        norm_parallel_sum: ps.value.op_norm(),
        shorted_norm: short.shorted.op_norm(),
        cond_apb: svd(&apb, tol)?.condition_on_range(),
        min_principal_angle: angle,
    })
}

/// Rows are computed in parallel on the current rayon pool and returned in
/// the order of `dims`.
pub fn divergence_sweep(dims: &[usize], tol: &Tol) -> Result<Vec<SweepRow>> {
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::BadDimensions);
    }
    dims.par_iter().map(|&d| sweep_row(d, tol)).collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// [`divergence_sweep`] on a dedicated pool of `threads` workers.
pub fn divergence_sweep_with_threads(dims: &[usize], tol: &Tol, threads: usize) -> Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| LabError::ThreadPool(e.to_string()))?;
    pool.install(|| divergence_sweep(dims, tol))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Closed forms against the numerical stack at one truncation.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    pub d: usize,
    /// `|sqrtAB^2 - (A0 + B0)|`
    pub sqrt_ab_square: f64,
    /// `|psd_power(A0 + B0, 1/2) - sqrtAB|`
    pub sqrt_ab_vs_spectral: f64,
    /// `|sqrtAB Xunique - B0|`
    pub x_unique_equation: f64,
    /// `|solve(sqrtAB, B0) - Xunique|` by LU
    pub x_unique_vs_direct_solve: f64,
    /// `| |Xunique| - 1 |`
    pub x_unique_norm_deviation: f64,
    /// `|(A0^(1/2))^2 - A0|`
    pub a0_sqrt_square: f64,
    /// `|psd_power(A0, 1/2) - A0^(1/2)|`
    pub a0_sqrt_vs_spectral: f64,
    pub rank_a0: usize,
    pub rank_b0: usize,
    /// Numerical rank of `R(A0^(1/2)) ∩ R(B0^(1/2))`.
    pub intersection_rank: usize,
    pub min_principal_angle: f64,
    pub strong_solution_norm: f64,
    /// `sqrt(1 + d^2)`
    pub strong_solution_norm_expected: f64,
    /// All residuals within their bounds (1e-10 for squares, norm and equation,
    /// 1e-9 for the spectral and direct-solve comparisons), ranks equal `d`,
    /// trivial intersection.
    pub all_within: bool,
}

pub fn verify_closed_forms(d: usize, tol: &Tol) -> Result<ClosedFormReport> {
    let kit = make_kit(d)?;
    let apb = kit.a_plus_b();
    let direct = solve(&kit.sqrt_ab, &kit.b0)?;
    let ra = range_basis(&kit.a0_sqrt, tol)?;
    let rb = range_basis(&kit.b0, tol)?;
    let strong = reduced_solution(&apb, &kit.b0, tol)?;
    let mut r = ClosedFormReport {
        d,
        sqrt_ab_square: (&kit.sqrt_ab.matmul(&kit.sqrt_ab) - &apb).op_norm(),
        sqrt_ab_vs_spectral: (&psd_power(&apb, 0.5, tol)? - &kit.sqrt_ab).op_norm(),
        x_unique_equation: (&kit.sqrt_ab.matmul(&kit.x_unique) - &kit.b0).op_norm(),
        x_unique_vs_direct_solve: (&direct - &kit.x_unique).op_norm(),
        x_unique_norm_deviation: (kit.x_unique.op_norm() - 1.0).abs(),
        a0_sqrt_square: (&kit.a0_sqrt.matmul(&kit.a0_sqrt) - &kit.a0).op_norm(),
        a0_sqrt_vs_spectral: (&psd_power(&kit.a0, 0.5, tol)? - &kit.a0_sqrt).op_norm(),
        rank_a0: svd(&kit.a0, tol)?.rank(),
        rank_b0: svd(&kit.b0, tol)?.rank(),
        intersection_rank: intersection_basis(&ra, &rb, tol.residual_rel, tol)?.cols(),
        min_principal_angle: min_principal_angle(&ra, &rb)?,
        strong_solution_norm: strong.norm(),
        strong_solution_norm_expected: (1.0 + (d * d) as f64).sqrt(),
        all_within: false,
    };
    r.all_within = r.sqrt_ab_square <= 1e-10
        && r.x_unique_equation <= 1e-10
        && r.x_unique_norm_deviation <= 1e-10
        && r.a0_sqrt_square <= 1e-10
        && r.sqrt_ab_vs_spectral <= 1e-9
        && r.x_unique_vs_direct_solve <= 1e-9
        && r.a0_sqrt_vs_spectral <= 1e-9
        && r.rank_a0 == d
        && r.rank_b0 == d
        && r.intersection_rank == 0;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_closed_forms() {
        let k = make_kit(1).unwrap();
        let r5 = 5f64.sqrt();
        let expect = Mat::from_real_rows(&[&[3.0, 1.0], &[1.0, 2.0]]).scale(1.0 / r5);
        assert!((&k.sqrt_ab - &expect).max_abs() < 1e-15);
        let x = Mat::from_real_rows(&[&[2.0, 0.0], &[-1.0, 0.0]]).scale(1.0 / r5);
        assert!((&k.x_unique - &x).max_abs() < 1e-15);
        assert!((f(1.0) - r5).abs() < 1e-15);
    }

    #[test]
    fn x_unique_has_unit_norm() {
        for d in [1, 5, 40] {
            let k = make_kit(d).unwrap();
            assert!((k.x_unique.op_norm() - 1.0).abs() <= 1e-12);
        }
        assert!(matches!(make_kit(0), Err(LabError::ZeroDimension)));
    }

    #[test]
    fn closed_forms_at_small_d() {
        let tol = Tol::default();
        for d in [1, 8, 16] {
            let r = verify_closed_forms(d, &tol).unwrap();
            assert!(r.all_within, "{r:?}");
            assert!((r.strong_solution_norm / r.strong_solution_norm_expected - 1.0).abs() < 1e-10);
            let angle = (1.0 / d as f64).atan();
            assert!((r.min_principal_angle - angle).abs() < 1e-12 * angle.max(1.0));
        }
    }

    #[test]
    fn sweep_rows_are_ordered_and_validated() {
        let tol = Tol::default();
        let rows = divergence_sweep(&[3, 8, 12], &tol).unwrap();
        assert_eq!(rows.iter().map(|r| r.d).collect::<Vec<_>>(), [3, 8, 12]);
        for r in &rows {
            assert!(r.norm_parallel_sum <= 1e-10 && r.shorted_norm <= 1e-9, "{r:?}");
            assert!((r.norm_weak_solutions - 1.0).abs() <= 1e-10, "{r:?}");
        }
        assert!(divergence_sweep(&[], &tol).is_err());
        assert!(divergence_sweep(&[8, 4], &tol).is_err());
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        let row = SweepRow {
            d: 2,
            norm_strong_solution: 1.0,
            norm_weak_solutions: 1.0,
            norm_parallel_sum: 0.0,
            shorted_norm: 0.0,
            cond_apb: 1.0,
            min_principal_angle: 0.5,
        };
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "d,norm_strong_solution,norm_weak_solutions,norm_parallel_sum,shorted_norm,cond_ApB,min_principal_angle"
        );
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((loglog_slope(&x, &y) - 2.0).abs() < 1e-12);
    }
}
