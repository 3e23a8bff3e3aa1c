//! Seeded random matrix generators for probes and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eig::jacobi;
use super::mat::{Mat, C64};

pub type ProbeRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ProbeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with independent standard normal real and imaginary parts.
pub fn random_complex<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> Mat {
    random_complex(n, n, rng).hermitian_part()
}

/// `X X*` with `X` of size `n x rank`.
pub fn random_psd<R: Rng>(n: usize, rank: usize, rng: &mut R) -> Mat {
    let x = random_complex(n, rank, rng);
    x.matmul(&x.adjoint()).hermitian_part()
}

/// Product of two Gaussian factors, rank `rank` almost surely.
pub fn random_low_rank<R: Rng>(rows: usize, cols: usize, rank: usize, rng: &mut R) -> Mat {
    random_complex(rows, rank, rng).matmul(&random_complex(rank, cols, rng))
}

/// Unitary matrix from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Mat {
    let (_, v) = jacobi(random_hermitian(n, rng), true);
    v.expect("vectors requested")
}

/// `W diag(s) V*` with random unitaries and the prescribed singular values.
pub fn with_singular_values<R: Rng>(rows: usize, cols: usize, s: &[f64], rng: &mut R) -> Mat {
    assert!(s.len() <= rows.min(cols));
    let w = random_unitary(rows, rng).submatrix(0, 0, rows, s.len());
    let v = random_unitary(cols, rng).submatrix(0, 0, cols, s.len());
    w.scale_columns(s).matmul(&v.adjoint())
}
