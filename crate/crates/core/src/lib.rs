//! Generalized polar decompositions, reduced solutions of `AX = C`,
//! (weak) complementability and bilateral shorted operators, and parallel
//! sums, for dense complex matrices.
//!
//! [`lab`] builds finite truncations of the classical counterexample pair
//! `A0 = [[I, S], [S, S^2]]`, `B0 = [[I, 0], [0, 0]]` with `S = diag(1, 1/2, ...)`
//! and measures how the infinite-dimensional pathologies show up as growth laws.

pub mod numkit;
pub mod polar;
pub mod douglas;
pub mod shorting;
pub mod parallel;
pub mod lab;

pub use numkit::{LinalgError, Mat, Proj, Tol, C64};
