//! Structural invariants checked over seeded ensembles and proptest inputs.

mod common;

use oplab_core::ensemble;
use oplab_core::linalg::{
    classify, extend_to_unitary, fro_norm, hermitian_part, loewner_margin, op_norm, operator_abs,
    polar_decompose, CMatrix, MatrixClass, Tolerance,
};
use oplab_core::means::geometric_mean_pd;
use oplab_core::linalg::PsdMatrix;
use oplab_core::spectral::{s_numbers, spectral_scale, TraceMode};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

#[test]
fn polar_consistency_over_dims_2_to_12() {
    // V R must reconstruct X across 500 seeds
    let mut checked = 0;
    for seed in 0..500u64 {
        let n = 2 + (seed % 11) as usize;
        let x = ensemble::ginibre(n, n, 1000 + seed);
        let (v, r) = polar_decompose(&x, tol()).unwrap();
        let resid = op_norm(&(v.matrix() * r.to_matrix() - &x)) / op_norm(&x).max(1e-300);
        assert!(resid < 1e-10, "seed {seed}: residual {resid}");
        checked += 1;
    }
    assert_eq!(checked, 500);
}

#[test]
fn abs_and_abs_adjoint_share_singular_values() {
    for seed in 0..100u64 {
        let n = 2 + (seed % 7) as usize;
        let x = ensemble::ginibre(n, n, 2000 + seed);
        let a = operator_abs(&x).unwrap();
        let b = operator_abs(&x.adjoint()).unwrap();
        for (p, q) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((p - q).abs() < 1e-10 * a.max_eigenvalue().max(1.0));
        }
    }
}

#[test]
fn unitary_extension_properties_over_ranks() {
    for seed in 0..100u64 {
        let n = 2 + (seed % 6) as usize;
        let rank = (seed % (n as u64 + 1)) as usize;
        let x = if rank == 0 {
            CMatrix::zeros(n, n)
        } else {
            &ensemble::ginibre(n, rank, 3000 + seed) * ensemble::ginibre(rank, n, 4000 + seed)
        };
        let (v, _) = polar_decompose(&x, tol()).unwrap();
        let w = extend_to_unitary(&v).unwrap();
        assert!(op_norm(&(w.adjoint() * &w - CMatrix::identity(n, n))) < 1e-10);
        let agree = &w * v.initial_projection().to_matrix() - v.matrix();
        assert!(op_norm(&agree) < 1e-10);
    }
}

#[test]
fn loewner_antisymmetry() {
    for seed in 0..50u64 {
        let n = 2 + (seed % 5) as usize;
        let a = hermitian_part(&ensemble::ginibre(n, n, 5000 + seed));
        // exact equality: both margins vanish, difference is zero
        assert!(loewner_margin(&a, &a).unwrap().abs() < 1e-14);
        // a genuinely two-sided comparable pair must be equal up to tolerance
        let d = hermitian_part(&ensemble::ginibre(n, n, 6000 + seed)).scale(1e-13);
        let b = &a + &d;
        let m1 = loewner_margin(&a, &b).unwrap();
        let m2 = loewner_margin(&b, &a).unwrap();
        if m1 >= 0.0 && m2 >= 0.0 {
            let scale = (op_norm(&a) + op_norm(&b)).max(1.0);
            assert!(fro_norm(&(&a - &b)) <= 1e-8 * scale);
        }
    }
}

#[test]
fn semi_hyponormal_collapses_to_normal_in_finite_dimension() {
    // contrapositive sampling: random non-normal matrices must fail the
    // semi-hyponormal test too
    let mut non_normal_seen = 0;
    for seed in 0..1000u64 {
        let n = 2 + (seed % 5) as usize;
        let x = ensemble::ginibre(n, n, 7000 + seed);
        let normal = classify(&x, MatrixClass::Normal, tol()).unwrap();
        if !normal {
            non_normal_seen += 1;
            assert!(
                !classify(&x, MatrixClass::SemiHyponormal, tol()).unwrap(),
                "seed {seed}: semi-hyponormal non-normal matrix in finite dimension"
            );
        }
    }
    assert!(non_normal_seen > 900, "ensemble should be generically non-normal");
    // and constructed normal matrices satisfy both
    for seed in 0..100u64 {
        let n = 2 + (seed % 5) as usize;
        let x = ensemble::normal_matrix(n, 8000 + seed);
        assert!(classify(&x, MatrixClass::Normal, tol()).unwrap());
        assert!(classify(&x, MatrixClass::SemiHyponormal, tol()).unwrap());
    }
}

#[test]
fn mean_symmetry_and_congruence_quick() {
    for seed in 0..50u64 {
        let n = 2 + (seed % 5) as usize;
        let a = PsdMatrix::from_matrix(
            &(common::psd_of_rank(n, n, 9000 + seed) + CMatrix::identity(n, n).scale(0.2)),
            tol(),
        )
        .unwrap();
        let b = PsdMatrix::from_matrix(
            &(common::psd_of_rank(n, n, 9500 + seed) + CMatrix::identity(n, n).scale(0.2)),
            tol(),
        )
        .unwrap();
        let scale = 1.0 + a.max_eigenvalue() + b.max_eigenvalue();
        let ab = geometric_mean_pd(&a, &b, tol()).unwrap().to_matrix();
        let ba = geometric_mean_pd(&b, &a, tol()).unwrap().to_matrix();
        assert!(op_norm(&(&ab - &ba)) < 1e-8 * scale, "symmetry failed at seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_scale_nonincreasing(seed in 0u64..5000, dim in 2usize..9, t1 in 0.001f64..0.999, t2 in 0.001f64..0.999) {
        let h = hermitian_part(&ensemble::ginibre(dim, dim, seed));
        let s = spectral_scale(&h, TraceMode::Normalized, tol()).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(s.eval(lo) >= s.eval(hi) - 1e-14);
    }

    #[test]
    fn s_numbers_adjoint_symmetry(seed in 0u64..5000, dim in 2usize..9) {
        let x = ensemble::ginibre(dim, dim, seed);
        let s1 = s_numbers(&x, TraceMode::Normalized).unwrap();
        let s2 = s_numbers(&x.adjoint(), TraceMode::Normalized).unwrap();
        for (a, b) in s1.values().iter().zip(s2.values()) {
            prop_assert!((a - b).abs() < 1e-10 * s1.lambda_zero().max(1.0));
        }
    }

    #[test]
    fn map_linearity(seed in 0u64..5000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let phi = ensemble::kraus_map(3, 4, seed).unwrap();
        let x = ensemble::ginibre(3, 3, seed ^ 0xabc);
        let y = ensemble::ginibre(3, 3, seed ^ 0xdef);
        let alpha = common::c(re, im);
        let lhs = phi.apply(&(&x * alpha + &y)).unwrap();
        let rhs = phi.apply(&x).unwrap() * alpha + phi.apply(&y).unwrap();
        let scale = op_norm(&rhs).max(1.0);
        prop_assert!(op_norm(&(&lhs - &rhs)) < 1e-10 * scale);
    }

    #[test]
    fn map_adjoint_equivariance(seed in 0u64..5000) {
        let phi = ensemble::schur_map(4, seed).unwrap();
        let x = ensemble::ginibre(4, 4, seed ^ 0x123);
        let lhs = phi.apply(&x.adjoint()).unwrap();
        let rhs = phi.apply(&x).unwrap().adjoint();
        prop_assert!(op_norm(&(&lhs - &rhs)) < 1e-10 * op_norm(&rhs).max(1.0));
    }
}
