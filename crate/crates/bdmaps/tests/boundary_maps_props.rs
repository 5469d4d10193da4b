use bdmaps::boundary_maps::{
    char_det, herglotz_check, lambda_asymptotic_leading, lambda_det, lambda_map,
    lambda_map_from_u_basis, lambda_s, lft_transfer, Mat2,
};
use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::Error;
use num_complex::Complex64 as C;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn potential() -> impl Strategy<Value = Potential> {
    prop_oneof![
        Just(Potential::zero(1.0)),
        (-3.0f64..3.0, 0.5f64..2.0).prop_map(|(a, f)| Potential::cosine(1.0, a, f, 0.0)),
    ]
}

fn angles() -> impl Strategy<Value = BoundaryAngles> {
    (0.05f64..3.09, 0.05f64..3.09).prop_map(|(a, b)| BoundaryAngles::new(a, b))
}

fn spectral_parameter() -> impl Strategy<Value = C> {
    prop_oneof![
        (-200.0f64..-5.0).prop_map(|x| C::new(x, 0.0)),
        (-30.0f64..60.0, 0.5f64..20.0).prop_map(|(x, y)| C::new(x, y)),
    ]
}

/// Skip draws that land (numerically) on a spectrum.
fn ok<T>(r: Result<T, Error>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::AtEigenvalue { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_matches_char_det_ratio(pot in potential(), z in spectral_parameter(),
                                  from in angles(), to in angles()) {
        let Some(got) = ok(lambda_det(&pot, z, &from, &to, TOL)) else { return Ok(()) };
        let dt = char_det(&pot, z, &to, TOL).unwrap().value;
        let df = char_det(&pot, z, &from, TOL).unwrap().value;
        let want = (dt / df).value();
        prop_assert!((got - want).norm() <= 100.0 * TOL * want.norm().max(1e-300),
            "{got} vs {want}");
    }

    #[test]
    fn group_and_inverse_laws(pot in potential(), z in spectral_parameter(),
                              a in angles(), b in angles(), c in angles()) {
        let (Some(ab), Some(bc), Some(ac), Some(ba)) = (
            ok(lambda_map(&pot, z, &a, &b, TOL)),
            ok(lambda_map(&pot, z, &b, &c, TOL)),
            ok(lambda_map(&pot, z, &a, &c, TOL)),
            ok(lambda_map(&pot, z, &b, &a, TOL)),
        ) else { return Ok(()) };
        let scale = ac.norm().max(1.0);
        prop_assert!((bc * ab - ac).norm() <= 1000.0 * TOL * scale);
        if let Some(inv) = ab.inverse() {
            prop_assert!((inv - ba).norm() <= 1000.0 * TOL * ba.norm().max(1.0));
        }
    }

    #[test]
    fn triangularity(pot in potential(), z in spectral_parameter(),
                     a in angles(), t in 0.05f64..3.09) {
        if let Some(l) = ok(lambda_map(&pot, z, &a, &BoundaryAngles::new(a.theta0, t), TOL)) {
            prop_assert!(l.a12.norm() <= 10.0 * TOL * l.norm());
        }
        if let Some(l) = ok(lambda_map(&pot, z, &a, &BoundaryAngles::new(t, a.theta_r), TOL)) {
            prop_assert!(l.a21.norm() <= 10.0 * TOL * l.norm());
        }
    }

    #[test]
    fn basis_invariance(pot in potential(), z in spectral_parameter(),
                        from in angles(), to in angles()) {
        let z = C::new(z.re.max(-60.0), z.im);
        let (Some(a), Some(b)) = (
            ok(lambda_map(&pot, z, &from, &to, TOL)),
            ok(lambda_map_from_u_basis(&pot, z, &from, &to, TOL)),
        ) else { return Ok(()) };
        prop_assert!((a - b).norm() <= 1000.0 * TOL * a.norm().max(1.0), "{a:?} {b:?}");
    }

    #[test]
    fn herglotz_positivity(pot in potential(), re in -50.0f64..80.0, im in 0.01f64..30.0,
                           from in angles(), d0 in 0.2f64..2.9, dr in 0.2f64..2.9) {
        let to = BoundaryAngles::new(from.theta0 + d0, from.theta_r + dr);
        let m = herglotz_check(&pot, C::new(re, im), &from, &to, TOL).unwrap();
        prop_assert!(m > 0.0, "{m}");
    }

    #[test]
    fn self_adjoint_below_spectra(pot in potential(), from in angles(),
                                  d0 in 0.2f64..2.9, dr in 0.2f64..2.9, z in -60.0f64..-20.0) {
        // Robin operators here have spectra above -1/sin² - max|V| - ...; the
        // lower bound used keeps z clear of both.
        let to = BoundaryAngles::new(from.theta0 + d0, from.theta_r + dr);
        let cot = |t: f64| (1.0 / t.tan()).abs();
        let floor = -(cot(from.theta0) + cot(from.theta_r) + cot(to.theta0) + cot(to.theta_r)
            + 1.0).powi(2) - 3.0;
        let z = z + floor;
        let m = lambda_s(&pot, C::new(z, 0.0), &from, &to, TOL).unwrap();
        prop_assert!((m - m.adjoint()).norm() <= 100.0 * TOL * m.norm(), "{m:?}");
    }

    #[test]
    fn lft_matches_direct(pot in potential(), z in spectral_parameter(),
                          th in angles(), thp in angles(), de in angles(),
                          s0 in 0.3f64..2.8, sr in 0.3f64..2.8) {
        let dep = BoundaryAngles::new(de.theta0 + s0, de.theta_r + sr);
        let (Some(reference), Some(direct)) = (
            ok(lambda_map(&pot, z, &de, &dep, TOL)),
            ok(lambda_map(&pot, z, &th, &thp, TOL)),
        ) else { return Ok(()) };
        let Ok(got) = lft_transfer(&reference, &th, &thp, &de, &dep) else { return Ok(()) };
        prop_assert!((got - direct).norm() <= 1000.0 * TOL * direct.norm().max(1.0),
            "{got:?} vs {direct:?}");
    }
}

#[test]
fn asymptotic_ratio_tends_to_one() {
    let to = BoundaryAngles::new(1.0, 2.0);
    let cases = [
        BoundaryAngles::new(0.7, 2.2),
        BoundaryAngles::new(0.0, 1.3),
        BoundaryAngles::new(0.4, 0.0),
        BoundaryAngles::dirichlet(),
    ];
    for pot in [Potential::zero(1.0), Potential::cosine(1.0, 1.0, 1.0, 0.0)] {
        for from in &cases {
            let z = -1e4;
            let det = lambda_det(&pot, C::new(z, 0.0), from, &to, TOL).unwrap();
            let lead = lambda_asymptotic_leading(from, &to, z).unwrap();
            let ratio = det / lead;
            assert!((ratio - 1.0).norm() < 0.05, "{from:?}: {ratio}");
        }
    }
}

#[test]
fn identity_map() {
    let a = BoundaryAngles::new(0.9, 2.1);
    let l = lambda_map(&Potential::cosine(1.0, 1.0, 1.0, 0.0), C::new(3.0, 1.0), &a, &a, TOL)
        .unwrap();
    assert!((l - Mat2::identity()).norm() < 1e-12);
}
