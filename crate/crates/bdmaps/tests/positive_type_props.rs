use bdmaps::positive_type::{
    default_t_grid, eigenvalues, frac_power_neg, positive_type_diagnostics, random_hermitian_pd,
    random_positive_type, spectral_oracle_power, sym_det_matrix, trace_formula_residual, DenseMatrix,
    QuadConfig,
};
use bdmaps::Complex64 as C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SLACK: f64 = 1e-6;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn inverse(a: &DenseMatrix) -> DenseMatrix {
    a.clone().try_inverse().unwrap()
}

fn shift(a: &DenseMatrix, z: f64) -> DenseMatrix {
    a - DenseMatrix::identity(a.nrows(), a.ncols()) * C::new(z, 0.0)
}

fn angle(a: &DenseMatrix) -> f64 {
    positive_type_diagnostics(a, &default_t_grid(a).unwrap())
        .unwrap()
        .sector_angle_estimate
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn powers_match_spectral_oracle(dim in 2usize..=8, seed in any::<u64>()) {
        let a = random_hermitian_pd(dim, 0.2, 5.0, &mut rng(seed));
        for alpha in [0.25, 0.5, 0.75, 1.25, 1.5] {
            let q = frac_power_neg(&a, C::new(alpha, 0.0), &QuadConfig::default()).unwrap();
            let o = spectral_oracle_power(&a, C::new(-alpha, 0.0)).unwrap();
            prop_assert!((&q - &o).norm() < 1e-8, "alpha {alpha}: {}", (&q - &o).norm());
        }
    }

    #[test]
    fn diagnostics_are_consistent(dim in 2usize..=6, seed in any::<u64>()) {
        let a = random_positive_type(dim, &mut rng(seed));
        let d = positive_type_diagnostics(&a, &default_t_grid(&a).unwrap()).unwrap();
        prop_assert!(d.m_a_estimate >= 1.0);
        prop_assert!(d.sector_angle_estimate <= std::f64::consts::PI - (1.0 / d.m_a_estimate).asin() + SLACK);
        prop_assert!((angle(&a.adjoint()) - d.sector_angle_estimate).abs() < SLACK);
        prop_assert!(angle(&inverse(&a)) <= d.sector_angle_estimate + SLACK);
        // no eigenvalue in the resolvent region built from M_A
        let m = d.m_a_estimate;
        for l in eigenvalues(&a).unwrap() {
            let in_wedge = l.re <= 0.0 && l.im.abs() < (l.re.abs() + 1.0) / m;
            prop_assert!(!in_wedge && l.norm() >= 1.0 / m, "{l} with M_A {m}");
        }
    }

    #[test]
    fn sym_det_matches_plain_determinant(dim in 2usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a0 = random_positive_type(dim, &mut r);
        let a = random_positive_type(dim, &mut r);
        let z = -1.0;
        let want = (shift(&a, z) * inverse(&shift(&a0, z))).determinant();
        let got = sym_det_matrix(&a, &a0, z).unwrap();
        prop_assert!((got - want).norm() < 1e-8 * want.norm().max(1.0), "{got} {want}");
    }
}

#[test]
fn trace_residual_is_second_order_for_random_pair() {
    let mut r = rng(42);
    let a = random_hermitian_pd(6, 0.5, 4.0, &mut r);
    let a0 = random_hermitian_pd(6, 0.5, 4.0, &mut r);
    let e: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| trace_formula_residual(&a, &a0, -1.0, h).unwrap())
        .collect();
    for w in e.windows(2) {
        assert!((3.5..=4.5).contains(&(w[0] / w[1])), "{e:?}");
    }
}
