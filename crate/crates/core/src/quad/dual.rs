use rayon::prelude::*;

use super::{
    check_point, near_origin, outer_radius, panel_edges, ray_crossings, refine_until, roundoff_floor, direction_rule,
    ErrorParts, Estimate, GaussRule, QuadratureSpec,
};
use crate::error::Result;
use crate::fields::ScalarField;
use crate::real::{dot, lit, norm, Real};
use crate::special::{norm_const_neg, sphere_area, KernelParams};

/// `(A(n,-(2-sigma))/2) int -delta(P,x,y) / |y|^{n+2-sigma} dy`, the
/// fractional Laplacian of order `2 - sigma` that inverts the Riesz
/// potential of order `2 - sigma`.
pub fn fractional_laplacian_dual<T: Real, F: ScalarField<T> + ?Sized>(
    p: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    dual_impl(p, x, params, spec, true)
}

/// The same operator in the one-sided principal value form
/// `A(n,-(2-sigma)) int (P(x) - P(x+y)) / |y|^{n+2-sigma} dy`, integrated over
/// the full sphere of directions on a node set without antipodal pairs.
pub fn fractional_laplacian_dual_one_sided<T: Real, F: ScalarField<T> + ?Sized>(
    p: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    dual_impl(p, x, params, spec, false)
}

fn dual_impl<T: Real, F: ScalarField<T> + ?Sized>(
    p: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
    symmetric: bool,
) -> Result<Estimate<T>> {
    check_point(p, x, params, spec)?;
    let n = params.n;
    let s_ord = params.dual_order();
    let half_a = norm_const_neg(n, s_ord)? / lit(2.0);
    let p0 = p.eval(x);
    let area = sphere_area::<T>(n);
    let (value, parts) = refine_until(spec, |s| {
        let near = near_origin(p, x, s.r_inner)?;
        let (big_r, exact) = outer_radius(p, x, s);
        let (fine, abs_sum) = dual_sum(p, x, p0, s_ord, near.rho, big_r, s, symmetric);
        let (coarse, _) = dual_sum(p, x, p0, s_ord, near.rho, big_r, &s.coarse(), symmetric);
        let taylor = near.taylor_scalar(n, s_ord).unwrap_or(T::zero());
        let tail_exact = lit::<T>(2.0) * p0 * area * big_r.powf(-s_ord) / s_ord;
        let total = -fine - taylor + tail_exact;
        let tail = if exact {
            T::zero()
        } else {
            lit::<T>(2.0) * p.abs_bound_outside(big_r - norm(x)) * area * big_r.powf(-s_ord) / s_ord
        };
        let parts = ErrorParts {
            discretization: (fine - coarse).abs() * half_a,
            near_origin: near.bound(n, s_ord) * half_a,
            tail: tail * half_a,
            roundoff: roundoff_floor(abs_sum) * half_a,
            scaling: near.scaling(s_ord),
        };
        Ok((total * half_a, parts))
    })?;
    Ok(Estimate { value, err_bound: parts.total() })
}

/// Returns `int delta t^{-1-s}` over the rule (the symmetric form), or twice
/// `int (P(x+t w) - P(x)) t^{-1-s}` over the full sphere (the one-sided form),
/// so that both estimate the same quantity.
#[allow(clippy::too_many_arguments)]
fn dual_sum<T: Real, F: ScalarField<T> + ?Sized>(
    p: &F,
    x: &[T],
    p0: T,
    s_ord: T,
    rho: T,
    big_r: T,
    s: &QuadratureSpec<T>,
    symmetric: bool,
) -> (T, T) {
    let n = x.len();
    let kinks = p.kink_radii();
    let rule = direction_rule(x, &kinks, s.angular_points, symmetric);
    let gauss = GaussRule::<T>::new(s.gauss_order);
    let x2 = dot(x, x);
    let two = lit::<T>(2.0);
    let per_dir: Vec<(T, T)> = rule
        .par_iter()
        .map(|(w, _)| {
            let b = dot(x, w);
            let mut splits = Vec::new();
            ray_crossings(b, x2, &kinks, rho, big_r, &mut splits);
            if symmetric {
                ray_crossings(-b, x2, &kinks, rho, big_r, &mut splits);
            }
            let edges = panel_edges(rho, big_r, rho, s.radial_levels, &splits);
            let mut plus = vec![T::zero(); n];
            let mut minus = vec![T::zero(); n];
            let (mut acc, mut abs) = (T::zero(), T::zero());
            for e in edges.windows(2) {
                for (t, wt) in gauss.on(e[0], e[1]) {
                    let k = wt * t.powf(-T::one() - s_ord);
                    for i in 0..n {
                        plus[i] = x[i] + t * w[i];
                    }
                    let up = p.eval(&plus);
                    if symmetric {
                        for i in 0..n {
                            minus[i] = x[i] - t * w[i];
                        }
                        let um = p.eval(&minus);
                        acc = acc + k * (up + um - p0 - p0);
                        abs = abs + k * (up.abs() + um.abs() + two * p0.abs());
                    } else {
                        acc = acc + k * two * (up - p0);
                        abs = abs + k * two * (up.abs() + p0.abs());
                    }
                }
            }
            (acc, abs)
        })
        .collect();
    rule.iter().zip(per_dir).fold((T::zero(), T::zero()), |(a, b), ((_, wd), (acc, abs))| (a + *wd * acc, b + *wd * abs))
}
