use rayon::prelude::*;

use super::{
    check_point, near_origin, outer_radius, panel_edges, ray_crossings, refine_until, roundoff_floor, direction_rule,
    ErrorParts, GaussRule, MatrixEstimate, QuadratureSpec,
};
use crate::error::Result;
use crate::fields::ScalarField;
use crate::matrixcore::SymMatrix;
use crate::real::{dot, lit, norm, Real};
use crate::special::{norm_const_neg, sphere_area, KernelParams};

/// `D^sigma u(x) = (A(n,-sigma)/2) int delta(u,x,y) (y (x) y) / |y|^{n+2+sigma} dy`
/// by a product rule over a hemisphere of directions and geometric radial
/// panels.
pub fn fractional_hessian<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<MatrixEstimate<T>> {
    check_point(u, x, params, spec)?;
    let n = params.n;
    let sigma = params.sigma;
    let half_a = norm_const_neg(n, sigma)? / lit(2.0);
    let u0 = u.eval(x);
    let area = sphere_area::<T>(n);
    let (value, parts) = refine_until(spec, |s| {
        let near = near_origin(u, x, s.r_inner)?;
        let (big_r, exact) = outer_radius(u, x, s);
        let (fine, abs_sum) = hessian_sum(u, x, u0, sigma, near.rho, big_r, s);
        let (coarse, _) = hessian_sum(u, x, u0, sigma, near.rho, big_r, &s.coarse());
        let mut m = fine.clone();
        if let Some(t) = near.taylor_matrix(n, sigma) {
            m = &m + &t;
        }
        let tail_exact = -lit::<T>(2.0) * u0 * area / T::from_count(n) * big_r.powf(-sigma) / sigma;
        m = &m + &SymMatrix::scaled_identity(n, tail_exact);
        let tail = if exact {
            T::zero()
        } else {
            lit::<T>(2.0) * u.abs_bound_outside(big_r - norm(x)) * area * big_r.powf(-sigma) / sigma
        };
        let parts = ErrorParts {
            discretization: (&fine - &coarse).frobenius() * half_a,
            near_origin: near.bound(n, sigma) * half_a,
            tail: tail * half_a,
            roundoff: roundoff_floor(abs_sum) * half_a,
            scaling: near.scaling(sigma),
        };
        Ok((m.scale(half_a), parts))
    })?;
    Ok(MatrixEstimate { value, err_bound: parts.total() })
}

fn hessian_sum<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    u0: T,
    sigma: T,
    rho: T,
    big_r: T,
    s: &QuadratureSpec<T>,
) -> (SymMatrix<T>, T) {
    let n = x.len();
    let kinks = u.kink_radii();
    let rule = direction_rule(x, &kinks, s.angular_points, true);
    let gauss = GaussRule::<T>::new(s.gauss_order);
    let x2 = dot(x, x);
    let per_dir: Vec<(T, T)> = rule
        .par_iter()
        .map(|(w, _)| {
            let b = dot(x, w);
            let mut splits = Vec::new();
            ray_crossings(b, x2, &kinks, rho, big_r, &mut splits);
            ray_crossings(-b, x2, &kinks, rho, big_r, &mut splits);
            let edges = panel_edges(rho, big_r, rho, s.radial_levels, &splits);
            let mut plus = vec![T::zero(); n];
            let mut minus = vec![T::zero(); n];
            let (mut acc, mut abs) = (T::zero(), T::zero());
            for e in edges.windows(2) {
                for (t, wt) in gauss.on(e[0], e[1]) {
                    for i in 0..n {
                        plus[i] = x[i] + t * w[i];
                        minus[i] = x[i] - t * w[i];
                    }
                    let (up, um) = (u.eval(&plus), u.eval(&minus));
                    let k = wt * t.powf(-T::one() - sigma);
                    acc = acc + k * (up + um - u0 - u0);
                    abs = abs + k * (up.abs() + um.abs() + lit::<T>(2.0) * u0.abs());
                }
            }
            (acc, abs)
        })
        .collect();
    let mut m = SymMatrix::zeros(n);
    let mut abs_sum = T::zero();
    for ((w, wd), (acc, abs)) in rule.iter().zip(per_dir) {
        let c = *wd * acc;
        for i in 0..n {
            for j in i..n {
                m.set(i, j, m.get(i, j) + c * w[i] * w[j]);
            }
        }
        abs_sum = abs_sum + *wd * abs;
    }
    (m, abs_sum)
}
