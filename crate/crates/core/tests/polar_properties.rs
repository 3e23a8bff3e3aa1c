use opshort::numkit::random::{random_complex, random_low_rank, rng, with_singular_values};
use opshort::numkit::{range_projector, svd, Tol};
use opshort::polar::{gpolar, gpolar_iterative, gpolar_residuals, polar_decompose, v_operator, v_residuals};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generalized_identities(seed in any::<u64>(), r in 1usize..12, c in 1usize..12, alpha in 0.05f64..0.95) {
        let tol = Tol::default();
        let t = random_complex(r, c, &mut rng(seed));
        let form = gpolar(&t, alpha, &tol).unwrap();
        let res = gpolar_residuals(&t, &form, &tol).unwrap();
        prop_assert!(res.max() <= 1e-9, "{:?}", res);
    }

    #[test]
    fn v_operator_is_canonical(seed in any::<u64>(), r in 1usize..9, c in 1usize..9, k in 1usize..9) {
        let tol = Tol::default();
        let t = random_low_rank(r, c, k.min(r).min(c), &mut rng(seed));
        let v = v_operator(&t, &tol).unwrap();
        prop_assert!(v_residuals(&t, &v, &tol).unwrap().max() <= 1e-9);
        prop_assert_eq!(svd(&v, &tol).unwrap().rank(), svd(&t, &tol).unwrap().rank());
        let pv = range_projector(&v, &tol).unwrap();
        let pt = range_projector(&t, &tol).unwrap();
        prop_assert!((pv.matrix() - pt.matrix()).op_norm() <= 1e-8);
        let dual = v_operator(&t.adjoint(), &tol).unwrap();
        prop_assert!((&dual - &v.adjoint()).op_norm() <= 1e-10 * t.op_norm().max(1.0));
    }

    #[test]
    fn factorization_holds_for_every_alpha(seed in any::<u64>(), n in 1usize..8, alpha in 0.01f64..0.99) {
        let tol = Tol::default();
        let t = random_low_rank(n + 1, n, n.div_ceil(2), &mut rng(seed));
        let f = gpolar(&t, alpha, &tol).unwrap();
        let abs_a = opshort::numkit::psd_power(&f.abs_t, alpha, &tol).unwrap();
        prop_assert!((&f.u.matmul(&abs_a) - &t).op_norm() <= 1e-9 * t.op_norm());
    }
}

#[test]
fn iteration_error_is_monotone() {
    let tol = Tol::default();
    let mut g = rng(41);
    let t = with_singular_values(4, 4, &[2.0, 1.3, 0.9, 0.5], &mut g);
    let limit = gpolar(&t, 0.6, &tol).unwrap().u;
    let errs: Vec<f64> = [1u64, 3, 10, 30, 100, 300, 1000]
        .iter()
        .map(|&n| (&gpolar_iterative(&t, 0.6, n).unwrap() - &limit).op_norm())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
}

#[test]
fn rectangular_iteration_uses_embedding() {
    let tol = Tol::default();
    let t = with_singular_values(3, 5, &[1.5, 0.8, 0.6], &mut rng(42));
    let u = gpolar_iterative(&t, 0.5, 100_000).unwrap();
    assert_eq!(u.shape(), (3, 5));
    let limit = gpolar(&t, 0.5, &tol).unwrap().u;
    assert!((&u - &limit).op_norm() <= 1e-4);
}

#[test]
fn classical_decomposition_dual_identities() {
    let tol = Tol::default();
    let t = random_low_rank(5, 4, 2, &mut rng(43));
    let p = polar_decompose(&t, &tol).unwrap();
    let coabs = opshort::numkit::absolute_value(&t, opshort::numkit::Side::Left, &tol).unwrap();
    assert!((&p.u.adjoint().matmul(&coabs) - &t.adjoint()).op_norm() <= 1e-10 * t.op_norm());
    let range = range_projector(&t, &tol).unwrap();
    assert!((&p.u.matmul(&p.u.adjoint()) - range.matrix()).op_norm() <= 1e-10);
}
