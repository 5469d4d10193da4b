use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::spectral::{
    count_below, eigenvalues, log_det_derivative, spectral_shift, ssf_counting_oracle,
    trace_from_eigenvalues, DEFAULT_EPS,
};
use bdmaps::Complex64 as C;
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

fn robin() -> impl Strategy<Value = BoundaryAngles> {
    (0.2f64..2.9, 0.2f64..2.9).prop_map(|(a, b)| BoundaryAngles::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigenvalues_are_simple_roots(pot in potential(), a in angles()) {
        let list = eigenvalues(&pot, &a, 8, TOL).unwrap();
        prop_assert!(list.values.windows(2).all(|w| w[1] > w[0]));
        for (k, &l) in list.values.iter().enumerate() {
            let gap = 1e-6 * l.abs().max(1.0);
            prop_assert_eq!(count_below(&pot, &a, l - gap, TOL).unwrap(), k);
            prop_assert_eq!(count_below(&pot, &a, l + gap, TOL).unwrap(), k + 1);
        }
        for r in list.residuals(TOL).unwrap() {
            prop_assert!(r < 1e-6, "residual {r}");
        }
    }

    #[test]
    fn one_changed_angle_interlaces(pot in potential(), a in angles(), t in 0.0f64..3.1,
                                    l in -20.0f64..300.0) {
        let b = BoundaryAngles::new(a.theta0, t);
        if let Ok(x) = ssf_counting_oracle(&pot, &a, &b, l, TOL) {
            prop_assert!(x.abs() <= 1);
        }
        let c = BoundaryAngles::new(t, b.theta_r);
        if let Ok(x) = ssf_counting_oracle(&pot, &a, &c, l, TOL) {
            prop_assert!(x.abs() <= 2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn trace_matches_log_det_derivative(pot in potential(), base in angles(), primed in robin(),
                                        z in -30.0f64..-1.0) {
        let eb = eigenvalues(&pot, &base, 80, 1e-8).unwrap();
        let ep = eigenvalues(&pot, &primed, 80, 1e-8).unwrap();
        let z = C::new(z.min(eb.values[0].min(ep.values[0]) - 1.0), 0.0);
        let t = trace_from_eigenvalues(&eb, &ep, z, 1e-6).unwrap();
        let d = log_det_derivative(&pot, &base, &primed, z, 1e-2, TOL).unwrap();
        prop_assert!((t.value - d.value).norm() < 1e-6, "{:?} vs {:?}", t, d);
    }

    #[test]
    fn ssf_matches_counting(pot in potential(), base in angles(), primed in robin()) {
        let grid: Vec<f64> = (0..10).map(|i| -15.0 + 9.0 * i as f64).collect();
        let s = spectral_shift(&pot, &base, &primed, &grid, &DEFAULT_EPS, TOL).unwrap();
        for smp in &s.samples {
            let want = ssf_counting_oracle(&pot, &base, &primed, smp.lambda, TOL).unwrap();
            prop_assert_eq!(smp.xi, want, "{:?}", smp);
            prop_assert!(smp.residual <= 0.01);
        }
    }
}
