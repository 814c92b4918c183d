use proptest::prelude::*;
use resurgence_core::germ::beta_weight;
use resurgence_core::*;

fn cplx() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn poly(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(cplx(), 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recenter_preserves_values(c in poly(10), h in cplx(), z in cplx()) {
        let g = Germ::new(C64::new(0.0, 0.0), c, 4.0).unwrap();
        let h = h * 0.9;
        let r = g.recenter(h).unwrap();
        prop_assert!((r.center() - h).norm() == 0.0);
        let w = h + z * 0.5;
        prop_assert!((r.eval_unchecked(w) - g.eval_unchecked(w)).norm() < 1e-11);
    }

    #[test]
    fn origin_convolution_is_commutative(a in poly(9), b in poly(9)) {
        let za = C64::new(0.0, 0.0);
        let f = Germ::new(za, a, 1.0).unwrap();
        let g = Germ::new(za, b, 1.0).unwrap();
        let x = convolve_at_origin(&f, &g, 20).unwrap();
        let y = convolve_at_origin(&g, &f, 20).unwrap();
        prop_assert_eq!(x.coeffs(), y.coeffs());
        prop_assert_eq!(x.coeffs()[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn beta_weights_match_the_recursion(j in 0usize..40, k in 0usize..40) {
        // B(j, k+1) = B(j, k)·(k+1)/(j+k+2)
        let lhs = beta_weight(j, k + 1);
        let rhs = beta_weight(j, k) * (k + 1) as f64 / (j + k + 2) as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        prop_assert_eq!(beta_weight(j, k), beta_weight(k, j));
    }

    #[test]
    fn omega_distance_and_membership(re in -6.0..6.0f64, im in -6.0..6.0f64) {
        let z = C64::new(re, im);
        let omega = OmegaSet::gaussian_integers();
        let d = omega.distance(z);
        let exact = ((re - re.round()).powi(2) + (im - im.round()).powi(2)).sqrt();
        prop_assert!((d - exact).abs() < 1e-12);
        let lattice = C64::new(re.round(), im.round());
        prop_assert!(omega.contains(lattice, 1e-12));
    }

    #[test]
    fn mollifier_range_and_zero_set(re in -1.0..5.0f64, im in -2.0..2.0f64, eps in 0.01..0.3f64) {
        let omega = OmegaSet::positive_integers();
        let m = Mollifier::build(&omega, eps, true).unwrap();
        let z = C64::new(re, im);
        let v = m.eval(z);
        prop_assert!((0.0..=1.0).contains(&v));
        // The origin contributes a single zero, the points of Ω closed ε-disks.
        let dist = omega.distance(z);
        if dist <= eps - 1e-12 || z.norm() == 0.0 {
            prop_assert_eq!(v, 0.0);
        }
        if dist >= eps + 1e-12 && z.norm() > 0.0 {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn vector_field_symmetry(re in -1.0..4.0f64, im in -2.0..2.0f64, t in 0.0..1.0f64) {
        let omega = OmegaSet::positive_integers();
        let m = Mollifier::build(&omega, 0.1, true).unwrap();
        let p = PiecewisePath::polyline(&[C64::new(0.5, 0.0), C64::new(0.5, 1.0), C64::new(2.5, 1.0)]).unwrap();
        let z = C64::new(re, im);
        if let (Ok(x), Ok(y)) = (vector_field(&m, &p, z, t), vector_field(&m, &p, p.at(t) - z, t)) {
            prop_assert!((x + y - p.derivative(t).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn reversed_path_swaps_endpoints(a in cplx(), b in cplx(), c in cplx()) {
        let p = PiecewisePath::polyline(&[a, b, c]).unwrap();
        let r = p.reversed();
        prop_assert_eq!(r.start(), p.end());
        prop_assert_eq!(r.end(), p.start());
        prop_assert!((r.length() - p.length()).abs() < 1e-12);
    }

    #[test]
    fn circle_winding(r in 0.1..3.0f64, re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let center = C64::new(re, im);
        let circle = PiecewisePath::circle(center, r, 0.0);
        let inner = center + C64::new(0.3 * r, 0.0);
        let outer = center + C64::new(1.7 * r, 0.0);
        prop_assert_eq!(winding_number(&circle, inner).unwrap(), 1);
        prop_assert_eq!(winding_number(&circle, outer).unwrap(), 0);
    }

    #[test]
    fn continued_polynomials_stay_polynomials(c in poly(6), end_re in 0.2..3.0f64, end_im in 0.2..1.5f64) {
        let omega = OmegaSet::positive_integers();
        let end = C64::new(end_re, end_im);
        let path = PiecewisePath::polyline(&[C64::new(0.3, 0.0), C64::new(0.3, end_im), end]).unwrap();
        let res = continue_along(&GermSource::Poly(c.clone()), &path, &omega, &ContinuationOptions::default()).unwrap();
        let direct = c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * end + a);
        prop_assert!((res.final_germ.coeffs()[0] - direct).norm() < 1e-10 * (1.0 + direct.norm()));
    }
}
