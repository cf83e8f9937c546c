use nonlocal_core::fields::{
    c1_continuity_defect, inf_convolution, mollify, radial_hessian, semiconcavity_check, Bump, FnField, InfConvParams,
    PowerTail, RadialField, RadialProfile, ScalarField, SplineProfile,
};
use proptest::prelude::*;

fn fd_hessian(u: &impl ScalarField<f64>, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let at = |si: f64, sj: f64| {
                let mut y = x.to_vec();
                y[i] += si * h;
                y[j] += sj * h;
                u.eval(&y)
            };
            out[i * n + j] = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radial_hessian_matches_differences(
        n in 2usize..4, amp in -2.0f64..2.0, radius in 0.5f64..2.0, r in 0.05f64..0.95, angle in 0.0f64..6.28,
    ) {
        let u = RadialField::new(n, Bump::new(amp, radius));
        let mut x = vec![0.0; n];
        x[0] = r * radius * angle.cos();
        x[1] = r * radius * angle.sin();
        let h = radial_hessian(u.profile(), &x).unwrap();
        let fd = fd_hessian(&u, &x, 1e-4);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((h.get(i, j) - fd[i * n + j]).abs() <= 1e-5 * (1.0 + amp.abs()) / (radius * radius));
            }
        }
    }

    #[test]
    fn mollification_preserves_affine_fields(eps in 0.01f64..0.5, a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0) {
        let f = FnField::new(2, 10.0, move |x: &[f64]| a * x[0] + b * x[1] + c);
        let m = mollify(f, eps).unwrap();
        let x = [0.3, -0.7];
        prop_assert!((m.eval(&x) - (a * x[0] + b * x[1] + c)).abs() <= 1e-12);
        prop_assert!(m.mass_defect() < 1e-3);
        prop_assert!(m.rule().all(|(z, _)| z.iter().map(|v| v * v).sum::<f64>().sqrt() <= eps));
    }
}

#[test]
fn bump_profile_is_c11_across_its_support() {
    let (jump, slope) = c1_continuity_defect(&Bump::new(1.5f64, 0.8));
    assert!(jump.abs() < 1e-12 && slope.abs() < 1e-12);
}

#[test]
fn spline_interpolates_and_converges_at_fourth_order() {
    let f = |r: f64| (-r * r).exp() * (1.0 + r * r);
    let err = |m: usize| {
        let knots: Vec<f64> = (0..=m).map(|i| 6.0 * i as f64 / m as f64).collect();
        let sp = SplineProfile::tabulate(knots.clone(), PowerTail { exponent: 0.0 }, f).unwrap();
        for &k in &knots {
            assert!((sp.phi(k) - f(k)).abs() < 1e-14);
        }
        (0..1000).map(|i| 5.0 * i as f64 / 1000.0).map(|r| (sp.phi(r) - f(r)).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(60), err(120));
    assert!(fine < 1e-5);
    assert!(coarse / fine > 10.0, "ratio {}", coarse / fine);
}

#[test]
fn spline_tail_decays_with_the_given_power() {
    let knots: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
    let sp = SplineProfile::tabulate(knots, PowerTail { exponent: 3.0 }, |r| 1.0 / (1.0 + r * r * r)).unwrap();
    let at2 = sp.phi(2.0);
    for r in [2.5, 4.0, 10.0] {
        assert!((sp.phi(r) - at2 * (2.0f64 / r).powi(3)).abs() < 1e-15);
    }
    assert!(SplineProfile::new(vec![0.1, 0.2, 0.3], vec![1.0; 3], PowerTail { exponent: 0.0 }).is_err());
}

#[test]
fn inf_convolution_of_a_clipped_quadratic() {
    let a = 2.0;
    let h = 0.1;
    let u = FnField::new(2, 1.0, move |y: &[f64]| (a * (y[0] * y[0] + y[1] * y[1]) / 2.0).min(1.0));
    let params = InfConvParams::for_bound(h, 0.05, 0.02, 1.0);
    let uh = inf_convolution(u, params).unwrap();
    for x in [[0.0, 0.0], [0.2, -0.1], [0.4, 0.3], [-0.5, 0.1]] {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let exact = a * r2 / (2.0 * (1.0 + a * h));
        assert!((uh.eval(&x) - exact).abs() < 1e-5, "x={x:?}");
        let (_, y) = uh.argmin(&x).unwrap();
        for i in 0..2 {
            assert!((y[i] - x[i] / (1.0 + a * h)).abs() < 2e-3);
        }
        assert!(uh.eval(&x) <= uh.inner().eval(&x));
    }
    let rep = semiconcavity_check(&uh, h, 500, 3, 1.0, 1e-6);
    assert_eq!(rep.violations, 0);
}

#[test]
fn inf_convolution_rejects_a_small_search_ball() {
    let u = FnField::new(2, 4.0, |_: &[f64]| 0.0);
    let mut params = InfConvParams::for_bound(0.5, 0.05, 0.05, 4.0);
    params.search_radius = 0.1;
    assert!(inf_convolution(u, params).is_err());
}
