use bdmaps::discrete_check::{
    convergence_study, discretize, form_gram, gram_identity_residual, resolvent_difference_singular_values,
    sym_det_closed_form, sym_det_discrete, sym_det_target, wronskian_identities,
};
use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::spectral::eigenvalues;
use bdmaps::Complex64 as C;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn potential() -> impl Strategy<Value = Potential> {
    prop_oneof![
        Just(Potential::zero(1.0)),
        (-3.0f64..3.0, 0.5f64..2.0).prop_map(|(a, f)| Potential::cosine(1.0, a, f, 0.0)),
    ]
}

fn robin() -> impl Strategy<Value = BoundaryAngles> {
    (0.2f64..2.9, 0.2f64..2.9).prop_map(|(a, b)| BoundaryAngles::new(a, b))
}

fn any_angles() -> impl Strategy<Value = BoundaryAngles> {
    prop_oneof![
        robin(),
        (0.2f64..2.9).prop_map(|b| BoundaryAngles::new(0.0, b)),
        (0.2f64..2.9).prop_map(|a| BoundaryAngles::new(a, 0.0)),
        Just(BoundaryAngles::dirichlet()),
    ]
}

fn lowest(pot: &Potential, a: &BoundaryAngles) -> f64 {
    eigenvalues(pot, a, 1, 1e-8).unwrap().values[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_lambda_determinant(pot in potential(), base in robin(), primed in robin(), gap in 1.0f64..20.0) {
        let z = lowest(&pot, &base).min(lowest(&pot, &primed)) - gap;
        let z = C::new(z, 0.0);
        let got = sym_det_closed_form(&pot, z, &base, &primed, TOL).unwrap();
        let want = sym_det_target(&pot, z, &base, &primed, TOL).unwrap();
        prop_assert!((got - want).norm() < 1e-7 * want.norm().max(1.0), "{got} {want}");
    }

    #[test]
    fn gram_entries_symmetric(pot in potential(), base in any_angles(), primed in robin(), gap in 1.0f64..20.0) {
        let z = C::new(lowest(&pot, &primed) - gap, 0.0);
        let g = form_gram(&pot, z, &base, &primed, TOL).unwrap();
        prop_assert!((g.c12 - g.c21).norm() < 100.0 * TOL * g.c12.norm().max(1.0));
        let r = gram_identity_residual(&pot, z, &base, &primed, TOL).unwrap();
        prop_assert!(r < 1000.0 * TOL, "{r}");
        let [a, b, c] = wronskian_identities(&pot, z, &primed, TOL).unwrap();
        prop_assert!((a - b).norm() < 100.0 * TOL * a.norm() && (a - c).norm() < 100.0 * TOL * a.norm());
    }

    #[test]
    fn resolvent_difference_has_rank_two(pot in potential(), base in any_angles(), primed in robin(), gap in 1.0f64..20.0) {
        let n = 40;
        let (hb, hp) = (discretize(&pot, &base, n).unwrap(), discretize(&pot, &primed, n).unwrap());
        let z = hb.lowest_eigenvalue().min(hp.lowest_eigenvalue()) - gap;
        let s = resolvent_difference_singular_values(&hb, &hp, z).unwrap();
        prop_assert!(s[2] <= 1e-10 * s[0], "{:?}", &s[..4]);
    }

    #[test]
    fn discrete_determinant_converges(pot in potential(), base in any_angles(), primed in robin(), gap in 2.0f64..20.0) {
        let z = lowest(&pot, &base).min(lowest(&pot, &primed)) - gap;
        let s = convergence_study(&pot, z, &base, &primed, &[100, 200, 400], TOL).unwrap();
        let last = s.rows.last().unwrap();
        prop_assert!(last.error < 1e-2 * s.target.abs().max(1.0), "{s:?}");
        if let Some(order) = s.order {
            prop_assert!(order > 0.9 || last.error < 1e-9, "{s:?}");
        }
    }
}

#[test]
fn discrete_sym_det_is_positive_for_robin_pairs() {
    let pot = Potential::cosine(1.0, 2.0, 1.0, 0.0);
    let base = BoundaryAngles::new(1.0, 2.0);
    let primed = BoundaryAngles::new(2.2, 0.6);
    let (hb, hp) = (discretize(&pot, &base, 80).unwrap(), discretize(&pot, &primed, 80).unwrap());
    let z = hb.lowest_eigenvalue().min(hp.lowest_eigenvalue()) - 1.0;
    let d = sym_det_discrete(&hb, &hp, z).unwrap();
    assert!(d > 0.0);
    let back = sym_det_discrete(&hp, &hb, z).unwrap();
    assert!((d * back - 1.0).abs() < 1e-10);
}
