use opshort::numkit::random::{random_complex, random_psd, rng};
use opshort::numkit::{Mat, Proj, Tol};
use opshort::shorting::{
    is_complementable, partition, random_complementable, schur_complement, shorted, verify_range_kernel,
    weak_complement_data, Mode,
};
use proptest::prelude::*;

fn first(n: usize, k: usize) -> Proj {
    Proj::coordinate(&(0..n).map(|i| i < k).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn complementable_implies_weak(seed in any::<u64>(), m in 2usize..8, n in 2usize..8) {
        let tol = Tol::default();
        let (t, pm, pn) = random_complementable(m, n, &mut rng(seed));
        let b = partition(&t, &pm, &pn, &tol).unwrap();
        prop_assert!(b.reassembly_residual() <= 1e-10 * t.op_norm().max(1.0));
        prop_assert!(is_complementable(&b, &tol).unwrap().verdict);
        let w = weak_complement_data(&b, &tol).unwrap();
        prop_assert!(w.all_solvable());
        prop_assert!(w.range_ok.iter().all(|&ok| ok));
        prop_assert!(w.polar_relations.iter().all(|&r| r <= 1e-9 * t.op_norm().max(1.0)));
    }

    #[test]
    fn shorted_duality_and_formulas(seed in any::<u64>(), m in 2usize..8, n in 2usize..8) {
        let tol = Tol::default();
        let (t, pm, pn) = random_complementable(m, n, &mut rng(seed));
        let s = shorted(&partition(&t, &pm, &pn, &tol).unwrap(), &tol).unwrap();
        let sd = shorted(&partition(&t.adjoint(), &pn, &pm, &tol).unwrap(), &tol).unwrap();
        prop_assert!((&sd.shorted - &s.shorted.adjoint()).op_norm() <= 1e-9 * t.op_norm().max(1.0));
        prop_assert!((&s.core - &s.core_simplified).op_norm() <= 1e-9 * t.op_norm().max(1.0));
        prop_assert_eq!(s.mode, Mode::Complementable);
    }

    #[test]
    fn psd_shorted_is_schur(seed in any::<u64>(), n in 2usize..12, k in 1usize..12, r in 1usize..12) {
        let tol = Tol::default();
        let k = k.min(n - 1);
        let t = random_psd(n, r.min(n), &mut rng(seed));
        let p = first(n, k);
        let b = partition(&t, &p, &p, &tol).unwrap();
        let s = shorted(&b, &tol).unwrap();
        let schur = schur_complement(&b, &tol).unwrap();
        prop_assert!((&s.core - &schur).op_norm() <= 1e-8 * t.op_norm());
    }
}

#[test]
fn range_kernel_equalities_on_random_instances() {
    let tol = Tol::default();
    let mut g = rng(50);
    for i in 0..20 {
        let (m, n) = (4 + i % 5, 3 + i % 7);
        let (t, pm, pn) = random_complementable(m, n, &mut g);
        let b = partition(&t, &pm, &pn, &tol).unwrap();
        let s = shorted(&b, &tol).unwrap();
        let r = verify_range_kernel(&b, &s, &tol).unwrap();
        assert!(r.range_equal && r.kernel_equal && r.sandwich, "{r:?}");
        assert_eq!(r.rank_shorted + r.dim_kernel_shorted, n);
    }
}

#[test]
fn shorted_support_in_n_and_m() {
    let tol = Tol::default();
    let mut g = rng(51);
    let t = random_complex(5, 5, &mut g);
    let pm = first(5, 2);
    let pn = Proj::coordinate(&[false, true, false, true, false]);
    let s = shorted(&partition(&t, &pm, &pn, &tol).unwrap(), &tol).unwrap();
    let support = pn.matrix().matmul(&s.shorted).matmul(pm.matrix());
    assert!((&support - &s.shorted).op_norm() <= 1e-10 * t.op_norm());
    assert!(s.witnesses.first_and_fourth_redundant);
}

#[test]
fn rank_deficient_corner_without_coupling() {
    let tol = Tol::default();
    let t = Mat::from_real_diag(&[2.0, 0.0, 1.0]);
    let p = first(3, 1);
    let b = partition(&t, &p, &p, &tol).unwrap();
    let s = shorted(&b, &tol).unwrap();
    assert!((&s.shorted - &Mat::from_real_diag(&[2.0, 0.0, 0.0])).op_norm() <= 1e-15);
}
