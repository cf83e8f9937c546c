use rayon::prelude::*;

use super::{
    check_point, panel_edges, ray_crossings, refine_until, roundoff_floor, direction_rule, ErrorParts, Estimate, GaussRule,
    QuadratureSpec,
};
use crate::error::{domain, Result};
use crate::fields::ScalarField;
use crate::real::{dot, lit, Real};
use crate::special::{norm_const_pos, KernelParams};

/// Ratio between the finest radial panel and the ray length in the
/// substituted variable.
const ORIGIN_ANCHOR: f64 = 1e-6;

/// `P(x) = A(n, 2-sigma) int v(y) |x-y|^{-n+2-sigma} dy` for compactly
/// supported `v`.
///
/// Polar coordinates around `x` with the substitution `s = t^{2-sigma}` turn
/// the weakly singular kernel into a bounded integrand; each ray is
/// integrated over its intersection with the support ball.
pub fn riesz_potential<T: Real, F: ScalarField<T> + ?Sized>(
    v: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    check_point(v, x, params, spec)?;
    let Some(support) = v.support_radius() else {
        return domain("Riesz potential requires a compactly supported density");
    };
    let a = norm_const_pos(params.n, params.sigma)?;
    let e = params.dual_order();
    let (value, parts) = refine_until(spec, |s| {
        let (fine, abs_sum) = riesz_sum(v, x, support, e, s);
        let (coarse, _) = riesz_sum(v, x, support, e, &s.coarse());
        let parts = ErrorParts {
            discretization: (fine - coarse).abs() * a,
            roundoff: roundoff_floor(abs_sum) * a,
            ..ErrorParts::zero()
        };
        Ok((fine * a, parts))
    })?;
    Ok(Estimate { value, err_bound: parts.total() })
}

fn riesz_sum<T: Real, F: ScalarField<T> + ?Sized>(v: &F, x: &[T], support: T, e: T, s: &QuadratureSpec<T>) -> (T, T) {
    let n = x.len();
    let mut kinks = v.kink_radii();
    kinks.push(support);
    let rule = direction_rule(x, &kinks, s.angular_points, false);
    let gauss = GaussRule::<T>::new(s.gauss_order);
    let x2 = dot(x, x);
    let inv_e = T::one() / e;
    let per_dir: Vec<(T, T)> = rule
        .par_iter()
        .map(|(w, _)| {
            let b = dot(x, w);
            let disc = b * b - x2 + support * support;
            if disc <= T::zero() {
                return (T::zero(), T::zero());
            }
            let t_hi = -b + disc.sqrt();
            if t_hi <= T::zero() {
                return (T::zero(), T::zero());
            }
            let t_lo = (-b - disc.sqrt()).max(T::zero());
            let mut splits = Vec::new();
            ray_crossings(b, x2, &kinks, t_lo, t_hi, &mut splits);
            let splits: Vec<T> = splits.into_iter().map(|t| t.powf(e)).collect();
            let (s_lo, s_hi) = (t_lo.powf(e), t_hi.powf(e));
            let anchor = if t_lo > T::zero() { s_lo } else { s_hi * lit(ORIGIN_ANCHOR) };
            let edges = panel_edges(s_lo, s_hi, anchor, s.radial_levels, &splits);
            let mut y = vec![T::zero(); n];
            let (mut acc, mut abs) = (T::zero(), T::zero());
            for ed in edges.windows(2) {
                for (sv, ws) in gauss.on(ed[0], ed[1]) {
                    let t = sv.powf(inv_e);
                    for i in 0..n {
                        y[i] = x[i] + t * w[i];
                    }
                    let val = v.eval(&y);
                    acc = acc + ws * val;
                    abs = abs + ws * val.abs();
                }
            }
            (acc * inv_e, abs * inv_e)
        })
        .collect();
    rule.iter().zip(per_dir).fold((T::zero(), T::zero()), |(a, b), ((_, wd), (acc, abs))| (a + *wd * acc, b + *wd * abs))
}
