mod common;

use common::*;
use jacobilab::linalg::{random_orthogonal, sample_unit_sphere};
use jacobilab::{
    build_rp, canonical_frame, classify_two_root_simple, duality_check, eigenvalue_bounds_check, emex_check,
    jacobi_matrix, quadratic_form_family, reconstruct, spectral_profile, PipelineConfig, Sign, SkewEndomorphism,
    TwoRootModelParams,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn sign_strategy() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn nus_strategy(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..4.0, k).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    })
}

fn model_strategy() -> impl Strategy<Value = (TwoRootModelParams, jacobilab::AlgebraicCurvatureTensor)> {
    (prop_oneof![Just(6usize), Just(8usize)], -2.0f64..2.0, sign_strategy(), any::<u64>())
        .prop_flat_map(|(n, mu, sign, seed)| (Just(n), Just(mu), Just(sign), Just(seed), nus_strategy(n / 2)))
        .prop_map(|(n, mu, sign, seed, nus)| {
            let params = TwoRootModelParams::new(n, mu, nus, random_orthogonal(n, seed), sign).unwrap();
            let r = jacobilab::build_two_root_model(&params).unwrap();
            (params, r)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn model_matches_closed_form((params, r) in model_strategy()) {
        let p = params.skew().unwrap();
        let oracle = oracle_model(p.matrix(), params.mu(), params.sign().value());
        let dev = r.components().iter().zip(&oracle).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn model_spectrum_matches_analytic((params, r) in model_strategy(), seed in any::<u64>()) {
        let p = params.skew().unwrap();
        let s = params.sign().value();
        for x in sample_unit_sphere(r.dim(), 4, seed) {
            let got = spectral_profile(&r, &x, 1e-7).unwrap();
            let want = oracle_model_spectrum(p.matrix(), params.mu(), s, &x);
            let roots = got.roots.unwrap();
            prop_assert!((roots.mu_x - want[0]).abs() < 1e-9);
            prop_assert!((roots.nu_x - want[want.len() - 1]).abs() < 1e-9);
            let oracle = oracle_reduced_spectrum(&r, &x);
            for (o, w) in oracle.iter().zip(&want) {
                prop_assert!((o - w).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobi_matrix_matches_multilinear_oracle((_, r) in model_strategy(), seed in any::<u64>()) {
        for x in sample_unit_sphere(r.dim(), 3, seed) {
            let fast = jacobi_matrix(&r, &x);
            let slow = oracle_jacobi(&r, &x);
            prop_assert!((fast.as_matrix() - slow).amax() < 1e-12 * r.scale());
        }
    }

    #[test]
    fn quadratic_family_evaluates_to_jacobi((_, r) in model_strategy(), seed in any::<u64>()) {
        let fam = quadratic_form_family(&r);
        let n = r.dim();
        let trace_form = (0..n).fold(DMatrix::zeros(n, n), |acc, a| acc + fam.form(a, a));
        for x in sample_unit_sphere(n, 5, seed) {
            let j = jacobi_matrix(&r, &x);
            for a in 0..n {
                for b in 0..n {
                    prop_assert!((fam.form(a, b) - fam.form(b, a)).amax() < 1e-12);
                    let q = (x.transpose() * fam.form(a, b) * &x)[(0, 0)];
                    prop_assert!((q - j.get(a, b)).abs() < 1e-10 * r.scale());
                }
            }
            let tr = (x.transpose() * &trace_form * &x)[(0, 0)];
            prop_assert!((tr - j.trace()).abs() < 1e-10 * r.scale());
        }
    }

    #[test]
    fn structural_checks_are_clean_on_models((_, r) in model_strategy(), seed in any::<u64>()) {
        let d = duality_check(&r, 8, seed, 1e-7).unwrap();
        prop_assert!(d.outcome.is_clean());
        prop_assert!(eigenvalue_bounds_check(&r, 8, seed, 1e-7).unwrap().is_clean());
        prop_assert!(emex_check(&r, 8, seed, 1e-7).unwrap().is_clean());
    }

    #[test]
    fn factorization_round_trip((params, r) in model_strategy(), seed in 0u64..1000) {
        let cfg = PipelineConfig { samples: 48, seed, rel_tol: 1e-7 };
        let rep = classify_two_root_simple(&r, &cfg).unwrap();
        let s = rep.structure().expect("certified");
        prop_assert_eq!(s.sign, params.sign());
        prop_assert!((s.mu - params.mu()).abs() < 1e-8);
        for (a, b) in s.nus.iter().zip(params.nus()) {
            prop_assert!((a - b).abs() < 1e-6);
        }
        prop_assert!(reconstruct(s).max_abs_diff(&r) <= 1e-8 * r.scale());
        // frame invariants
        for i in 0..s.nus.len() {
            let e = s.frame.column(2 * i).into_owned();
            let f = s.frame.column(2 * i + 1).into_owned();
            let root = s.nus[i].sqrt();
            prop_assert!((s.p.apply(&e) - &f * root).amax() < 1e-8);
            prop_assert!((s.p.apply(&f) + &e * root).amax() < 1e-8);
        }
    }

    #[test]
    fn scale_equivariance((params, r) in model_strategy(), c in prop_oneof![0.2f64..5.0, -5.0f64..-0.2]) {
        let cfg = PipelineConfig { samples: 32, seed: 1, rel_tol: 1e-7 };
        let scaled = &r * c;
        let rep = classify_two_root_simple(&scaled, &cfg).unwrap();
        let s = rep.structure().expect("certified");
        let want_sign = if c > 0.0 { params.sign() } else { params.sign().flipped() };
        prop_assert_eq!(s.sign, want_sign);
        prop_assert!((s.mu - c.abs() * params.mu()).abs() < 1e-7);
        for (a, b) in s.nus.iter().zip(params.nus()) {
            prop_assert!((a - c.abs() * b).abs() < 1e-6);
        }
    }

    #[test]
    fn sign_flip_negates_reconstruction((_, r) in model_strategy()) {
        let rep = classify_two_root_simple(&r, &PipelineConfig { samples: 32, seed: 2, rel_tol: 1e-7 }).unwrap();
        let mut s = rep.structure().unwrap().clone();
        let before = reconstruct(&s);
        s.sign = s.sign.flipped();
        prop_assert!((&before + &reconstruct(&s)).max_abs() < 1e-12);
    }

    #[test]
    fn canonical_frame_recovers_nus(nus in nus_strategy(4), seed in any::<u64>()) {
        let p = SkewEndomorphism::from_frame(&random_orthogonal(8, seed), &nus).unwrap();
        let cf = canonical_frame(&p, 1e-7).unwrap();
        for (a, b) in cf.nus.iter().zip(&nus) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let gram = cf.frame.transpose() * &cf.frame;
        prop_assert!((gram - DMatrix::identity(8, 8)).amax() < 1e-9);
    }
}

#[test]
fn rp_of_complex_structure_has_spectrum_minus_three() {
    let p = SkewEndomorphism::from_frame(&random_orthogonal(6, 4), &[1.0; 3]).unwrap();
    let r = build_rp(&p);
    for x in sample_unit_sphere(6, 8, 5) {
        let spec = oracle_reduced_spectrum(&r, &x);
        assert!((spec[0] + 3.0).abs() < 1e-10);
        assert!(spec[1..].iter().all(|v| v.abs() < 1e-10));
    }
}

#[test]
fn q7_fixture_spectrum() {
    let r = octonion_q7_tensor(1.0);
    for x in sample_unit_sphere(16, 4, 1) {
        let prof = spectral_profile(&r, &x, 1e-7).unwrap();
        assert_eq!(prof.clusters.multiplicities(), vec![8, 7]);
        let v = prof.clusters.values();
        assert!((v[0] - 1.0).abs() < 1e-10 && (v[1] - 2.0).abs() < 1e-10);
    }
}
