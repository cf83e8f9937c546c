use nonlocal_core::fields::{Bump, RadialField, ScalarField};
use nonlocal_core::matrixcore::{in_class, pucci_extremal_trace, random_orthogonal, Sign, SymMatrix};
use nonlocal_core::nonlocal::{
    halton_ball, hessian_auto, hessian_consistency, pucci_from_hessian, pucci_minus, pucci_plus, riesz_inf_ratio,
    sphere_directions, InfSampling, PotentialHessian,
};
use nonlocal_core::quad::{MatrixEstimate, QuadratureSpec};
use nonlocal_core::special::KernelParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn admissible(p: &KernelParams<f64>, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    loop {
        let q: Vec<f64> = random_orthogonal(p.n, rng);
        let a: Vec<f64> = (0..p.n).map(|_| rng.random_range(0.0..2.0 * p.big_lambda)).collect();
        let m = SymMatrix::diag(&a).conjugate(&q);
        if in_class(&m, p) {
            return m;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_operators_lie_between_the_pucci_extremes(
        seed in 0u64..1000, sigma in 0.2f64..1.9, r in 0.0f64..1.4, n in 2usize..4,
    ) {
        let p = KernelParams::new(n, sigma, 1.0, 4.0).unwrap();
        let spec = QuadratureSpec::default();
        let u = RadialField::new(n, Bump::new(1.0, 1.0));
        let mut x = vec![0.0; n];
        x[0] = r;
        let h = hessian_auto(&u, &x, &p, &spec).unwrap();
        let lo = pucci_from_hessian(&h, &p, Sign::Minus).unwrap();
        let hi = pucci_from_hessian(&h, &p, Sign::Plus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let a = admissible(&p, &mut rng);
            let v = a.trace_product(&h.value);
            prop_assert!(lo.value <= v + 1e-12 * v.abs().max(1.0));
            prop_assert!(v <= hi.value + 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn extremal_error_bound_covers_perturbations(seed in 0u64..1000, sigma in 0.2f64..1.9, n in 2usize..4, size in 1e-8f64..1e-2) {
        let p = KernelParams::new(n, sigma, 1.0, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let e = SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let e = e.scale(size / e.frobenius());
        let est = MatrixEstimate { value: d.clone(), err_bound: size };
        for sign in [Sign::Minus, Sign::Plus] {
            let base = pucci_from_hessian(&est, &p, sign).unwrap();
            let moved = pucci_extremal_trace(&(&d + &e), &p, sign).unwrap().value;
            prop_assert!((moved - base.value).abs() <= base.err_bound * (1.0 + 1e-9) + 1e-15);
        }
    }
}

#[test]
fn pucci_operators_are_dual_on_fields() {
    let spec = QuadratureSpec::default();
    for (n, sigma) in [(2usize, 0.7f64), (3, 1.5)] {
        let p = KernelParams::new(n, sigma, 1.0, 4.0).unwrap();
        let u = RadialField::new(n, Bump::new(1.0, 1.0));
        let neg = RadialField::new(n, Bump::new(-1.0, 1.0));
        for r in [0.0, 0.5, 1.2] {
            let mut x = vec![0.0f64; n];
            x[n - 1] = r;
            let plus = pucci_plus(&u, &x, &p, &spec).unwrap();
            let minus = pucci_minus(&neg, &x, &p, &spec).unwrap();
            assert!((plus.value + minus.value).abs() <= 1e-12 * plus.value.abs().max(1.0));
            assert!(pucci_minus(&u, &x, &p, &spec).unwrap().value <= plus.value);
        }
    }
}

#[test]
fn potential_hessian_agrees_with_the_fractional_hessian() {
    let p = KernelParams::new(2, 1.5, 1.0, 4.0).unwrap();
    let v = RadialField::new(2, Bump::new(1.0, 1.0));
    let fd = PotentialHessian::FiniteDifference { step: 0.05, potential_tol: 1e-10 };
    let rep = hessian_consistency(&v, &[0.24, -0.32], &p, &QuadratureSpec::default(), fd).unwrap();
    assert!(rep.within_bounds(), "{} > {}", rep.discrepancy, rep.combined_bound());
    assert!(rep.relative < 5e-3);
}

#[test]
fn riesz_infimum_relation_for_a_negative_bump() {
    let p = KernelParams::new(2, 1.5, 1.0, 4.0).unwrap();
    let v = RadialField::new(2, Bump::new(-1.0, 1.0));
    let rep = riesz_inf_ratio(&v, 1.0, &p, &QuadratureSpec::default().with_tol(1e-3), &InfSampling::default()).unwrap();
    assert!(rep.lhs <= rep.rhs + rep.slack);
    assert!(rep.inf_inside < 0.0);
    let wide = RadialField::new(2, Bump::new(-1.0, 2.0));
    assert!(riesz_inf_ratio(&wide, 1.0, &p, &QuadratureSpec::default(), &InfSampling::default()).is_err());
}

#[test]
fn sample_sets_have_the_advertised_shape() {
    for n in [2usize, 3] {
        let pts = halton_ball::<f64>(n, 0.7, 50);
        assert_eq!(pts.len(), 51);
        assert!(pts[0].iter().all(|&v| v == 0.0));
        assert!(pts.iter().all(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt() <= 0.7 + 1e-15));
        let dirs = sphere_directions::<f64>(n, 40);
        assert_eq!(dirs.len(), 40);
        assert!(dirs.iter().all(|d| (d.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14));
        let mean: Vec<f64> = (0..n).map(|i| dirs.iter().map(|d| d[i]).sum::<f64>() / 40.0).collect();
        assert!(mean.iter().all(|m| m.abs() < 0.05));
    }
    let u = RadialField::new(2, Bump::new(1.0, 1.0));
    assert_eq!(u.eval(&[2.0, 0.0]), 0.0);
}
