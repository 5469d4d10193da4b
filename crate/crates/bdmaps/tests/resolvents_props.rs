use bdmaps::boundary_maps::trace_map;
use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::resolvents::{
    apply_resolvent, boundary_rows, greens_kernel, krein_correction_trace, krein_resolvent,
    lambda_derivative_identity,
};
use bdmaps::spectral::{eigenvalues, trace_resolvent_diff};
use bdmaps::{Complex64 as C, Error};
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn potential() -> impl Strategy<Value = Potential> {
    prop_oneof![
        Just(Potential::zero(1.0)),
        (-3.0f64..3.0, 0.5f64..2.0).prop_map(|(a, f)| Potential::cosine(1.0, a, f, 0.0)),
    ]
}

fn angles() -> impl Strategy<Value = BoundaryAngles> {
    (0.0f64..3.1, 0.0f64..3.1).prop_map(|(a, b)| BoundaryAngles::new(a, b))
}

fn z_off_axis() -> impl Strategy<Value = C> {
    (-30.0f64..40.0, 0.3f64..10.0, any::<bool>())
        .prop_map(|(x, y, up)| C::new(x, if up { y } else { -y }))
}

fn forcing(k: usize) -> impl Fn(f64) -> C {
    move |x: f64| match k {
        0 => C::new(1.0, 0.0),
        1 => C::new(x, 0.0),
        _ => C::new((std::f64::consts::PI * x).sin(), 0.0),
    }
}

fn sup(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn greens_symmetry(pot in potential(), a in angles(), x in 0.0f64..1.0, y in 0.0f64..1.0,
                       z in -60.0f64..60.0) {
        let g1 = greens_kernel(&pot, C::new(z, 0.0), &a, x, y, TOL);
        let g2 = greens_kernel(&pot, C::new(z, 0.0), &a, y, x, TOL);
        match (g1, g2) {
            (Ok(g1), Ok(g2)) => prop_assert!((g1 - g2).norm() <= 100.0 * TOL * g1.norm().max(1.0)),
            (Err(Error::AtEigenvalue { .. }), _) | (_, Err(Error::AtEigenvalue { .. })) => {}
            (e1, e2) => panic!("{e1:?} {e2:?}"),
        }
    }

    #[test]
    fn rows_match_traces(pot in potential(), base in angles(), primed in angles(),
                         z in z_off_axis(), k in 0usize..3) {
        let f = forcing(k);
        let b = boundary_rows(&pot, z, &base, &primed, &f, TOL).unwrap();
        let u = apply_resolvent(&pot, z, &base, &f, TOL).unwrap();
        let t = trace_map(&primed, &u);
        let scale = b.c0.norm().max(b.c_r.norm()).max(1.0);
        prop_assert!((b.c0 - t.c0).norm() <= 100.0 * TOL * scale, "{b:?} vs {t:?}");
        prop_assert!((b.c_r - t.c_r).norm() <= 100.0 * TOL * scale, "{b:?} vs {t:?}");
        let own = trace_map(&base, &u);
        prop_assert!(own.c0.norm().max(own.c_r.norm()) <= 10.0 * TOL * scale.max(1.0) * 10.0);
    }

    #[test]
    fn krein_matches_direct(pot in potential(), base in angles(), primed in angles(),
                            regime in 0usize..3, z in z_off_axis(), k in 0usize..3) {
        let primed = match regime {
            0 => primed,
            1 => BoundaryAngles::new(primed.theta0, base.theta_r),
            _ => BoundaryAngles::new(base.theta0, primed.theta_r),
        };
        let f = forcing(k);
        let got = krein_resolvent(&pot, z, &base, &primed, &f, TOL);
        let Ok(got) = got else { return Ok(()) };
        let want = apply_resolvent(&pot, z, &primed, &f, TOL).unwrap();
        let scale = want.u.iter().fold(1.0f64, |m, v| m.max(v.norm()));
        prop_assert!(sup(&got.u, &want.u) <= 100.0 * TOL * scale, "{}", sup(&got.u, &want.u));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn derivative_identity_second_order(pot in potential(), b0 in 0.3f64..2.8, br in 0.0f64..2.8,
                                        primed in angles(), z in -30.0f64..-12.0) {
        // keep z well below both ground states so the difference quotient is smooth
        let base = BoundaryAngles::new(b0, br);
        let e0 = eigenvalues(&pot, &base, 1, TOL).unwrap().values[0]
            .min(eigenvalues(&pot, &primed, 1, TOL).unwrap().values[0]);
        let z = C::new(z.min(e0 - 10.0), 0.0);
        let r1 = lambda_derivative_identity(&pot, z, &base, &primed, 0.2, TOL).unwrap();
        let r2 = lambda_derivative_identity(&pot, z, &base, &primed, 0.1, TOL).unwrap();
        prop_assert!(r2 <= 1e-3);
        prop_assert!(r1 / r2 > 3.0 || r2 < 1e-8, "{r1} {r2}");
    }
}

#[test]
fn correction_trace_matches_eigen_sum() {
    let pot = Potential::cosine(1.0, 1.0, 2.0 * std::f64::consts::PI, 0.0);
    let base = BoundaryAngles::new(0.4, 1.2);
    let primed = BoundaryAngles::new(2.0, 0.9);
    let z = C::new(-6.0, 0.0);
    let k = krein_correction_trace(&pot, z, &base, &primed, TOL).unwrap();
    let t = trace_resolvent_diff(&pot, &base, &primed, z, 100, 1e-6).unwrap();
    assert!((k - t.value).norm() < 1e-6, "{k} vs {:?}", t);
}
