use clarklab::clark::{finite_spectral_measure, herglotz_residual, theta_beta_from_measure, theta_from_measure};
use clarklab::dense::{op_norm, unitarity_residual};
use clarklab::sample::{
    random_atomic_measure, random_cnu, random_contraction, random_disc_point, random_unitary, CnuKind,
};
use clarklab::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn defect_operators_square_to_defects(seed in any::<u64>(), dim in 1usize..9, norm in 0.1f64..1.0) {
        let mut r = rng(seed);
        let c = random_contraction::<f64, _>(dim, norm, &mut r);
        let rec = defect_data(&c, 1e-10).unwrap();
        let id = Matrix64::identity(dim, dim);
        prop_assert!((&rec.defect * &rec.defect - (&id - c.adjoint() * &c)).norm() < 1e-10);
        prop_assert!((&rec.defect_star * &rec.defect_star - (&id - &c * c.adjoint())).norm() < 1e-10);
        // intertwining C D = D_* C
        prop_assert!((&c * &rec.defect - &rec.defect_star * &c).norm() < 1e-10);
        prop_assert_eq!(rec.n, rec.basis_d.ncols());
    }

    #[test]
    fn unitary_parameter_gives_unitary_perturbation(seed in any::<u64>(), dim in 2usize..9, defects in 1usize..3) {
        let mut r = rng(seed);
        let defects = defects.min(dim);
        let u = random_cnu::<f64, _>(dim, defects, CnuKind::General { max_singular: 0.9 }, &mut r).unwrap();
        let rec = defect_data(&u, 1e-10).unwrap();
        let a = random_unitary::<f64, _>(rec.n, &mut r);
        prop_assert!(unitarity_residual(&perturb(&rec, &a).unwrap()) < 1e-10);
    }

    #[test]
    fn strict_parameter_keeps_defect_dimension(seed in any::<u64>(), dim in 2usize..9) {
        let mut r = rng(seed);
        let u = random_cnu::<f64, _>(dim, 1, CnuKind::PartialIsometry, &mut r).unwrap();
        let rec = defect_data(&u, 1e-10).unwrap();
        let a = random_contraction::<f64, _>(1, 0.9, &mut r);
        let rec_a = defect_data(&perturb(&rec, &a).unwrap(), 1e-10).unwrap();
        prop_assert_eq!((rec_a.n, rec_a.n_star), (1, 1));
    }

    #[test]
    fn definitional_char_fn_is_contractive(seed in any::<u64>(), dim in 2usize..9) {
        let mut r = rng(seed);
        let u = random_cnu::<f64, _>(dim, 1.max(dim / 3), CnuKind::General { max_singular: 0.8 }, &mut r).unwrap();
        let f = CharFn::definitional(defect_data(&u, 1e-10).unwrap());
        for _ in 0..10 {
            let z = random_disc_point::<f64, _>(0.999, &mut r);
            prop_assert!(op_norm(&f.eval(z).unwrap()) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn measure_theta_is_schur_class(seed in any::<u64>(), k in 1usize..12) {
        let mut r = rng(seed);
        let mu = random_atomic_measure::<f64, _>(k, &mut r).unwrap();
        prop_assert!(theta_from_measure(&mu, C64::new(0.0, 0.0)).unwrap().norm() < 1e-15);
        for _ in 0..10 {
            let z = random_disc_point::<f64, _>(0.999, &mut r);
            prop_assert!(theta_from_measure(&mu, z).unwrap().norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn beta_family_is_the_livsic_image(seed in any::<u64>(), k in 1usize..8) {
        let mut r = rng(seed);
        let mu = random_atomic_measure::<f64, _>(k, &mut r).unwrap();
        let beta = random_disc_point::<f64, _>(0.9, &mut r);
        for _ in 0..10 {
            let z = random_disc_point::<f64, _>(0.99, &mut r);
            let direct = theta_beta_from_measure(&mu, beta, z).unwrap();
            let via = livsic_transform(theta_from_measure(&mu, z).unwrap(), beta).unwrap();
            prop_assert!((direct - via).norm() < 1e-10);
        }
    }

    #[test]
    fn clark_family_satisfies_herglotz(seed in any::<u64>(), k in 1usize..9, t in 0.0f64..std::f64::consts::TAU) {
        let mut r = rng(seed);
        let mu = random_atomic_measure::<f64, _>(k, &mut r).unwrap();
        let gamma = unimodular(t);
        let mg = finite_spectral_measure(&mu, gamma).unwrap();
        for _ in 0..5 {
            let z = clarklab::sample::random_off_circle_point::<f64, _>(1e-2, &mut r);
            prop_assert!(herglotz_residual(&mu, &mg, gamma, z).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn dilation_identity_is_glue_independent(seed in any::<u64>(), dim in 2usize..7) {
        let mut r = rng(seed);
        let defects = 1 + (dim > 3) as usize;
        let u = random_cnu::<f64, _>(dim, defects, CnuKind::PartialIsometry, &mut r).unwrap();
        let rec = defect_data(&u, 1e-10).unwrap();
        let gi = random_unitary(defects, &mut r);
        let go = random_unitary(defects, &mut r);
        let b = build_dilation(&rec, 6, &gi, &go, DilationMode::Truncated).unwrap();
        prop_assert!(verify_dilation(&b, 6).unwrap() <= 1e-12);
    }
}
