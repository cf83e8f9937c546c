//! Radially reduced quadratures: for `u(x) = phi(|x|)` the integrals over
//! `R^n` collapse to `(t, theta)` with `y = t (cos(theta) xhat + sin(theta) e)`
//! and the measure `|S^{n-2}| sin^{n-2}(theta)`.

use rayon::prelude::*;

use super::{
    check_point, near_origin, outer_radius, panel_edges, refine_until, roundoff_floor, ErrorParts, Estimate, GaussRule,
    MatrixEstimate, QuadratureSpec,
};
use crate::error::{domain, Result};
use crate::fields::{RadialProfile, ScalarField};
use crate::matrixcore::SymMatrix;
use crate::real::{lit, norm, on_axis, Real};
use crate::special::{norm_const_neg, norm_const_pos, sphere_area, KernelParams};

/// Radial and tangential parts of `int delta (w (x) w) t^{-1-e} dt dw`.
#[derive(Debug, Clone, Copy)]
struct Parts<T> {
    radial: T,
    tangential: T,
    abs: T,
}

/// `t`-splits where a sphere `|z| = k` starts or stops meeting `|z - x| = t`.
fn shell_splits<T: Real>(r: T, kinks: &[T], lo: T, hi: T) -> Vec<T> {
    let mut out = Vec::new();
    for &k in kinks {
        for t in [(k - r).abs(), k + r] {
            if t > lo && t < hi {
                out.push(t);
            }
        }
    }
    out
}

/// Angles in `(a, b)` where `|x + t w(theta)| = k` or `|x - t w(theta)| = k`.
fn angle_splits<T: Real>(r: T, t: T, kinks: &[T], a: T, b: T, both_signs: bool) -> Vec<T> {
    let mut out = vec![a, b];
    if r > T::zero() {
        for &k in kinks {
            let c = (k * k - r * r - t * t) / (lit::<T>(2.0) * r * t);
            let cands = if both_signs { vec![c, -c] } else { vec![c] };
            for c in cands {
                if c > -T::one() && c < T::one() {
                    let th = c.acos();
                    if th > a && th < b {
                        out.push(th);
                    }
                }
            }
        }
    }
    out.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Gauss nodes over `[a, b]` split at `cuts`, with roughly `per_quarter`
/// panels per quarter turn.
fn angular_nodes<T: Real>(cuts: &[T], per_quarter: usize, gauss: &GaussRule<T>, out: &mut Vec<(T, T)>) {
    out.clear();
    let quarter = T::FRAC_PI_2();
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= T::zero() {
            continue;
        }
        let k = ((len / quarter) * T::from_count(per_quarter)).ceil().to_f64_lossy().max(1.0) as usize;
        let h = len / T::from_count(k);
        for j in 0..k {
            let a = w[0] + h * T::from_count(j);
            out.extend(gauss.on(a, a + h));
        }
    }
}

fn delta_parts<T: Real>(
    p: &dyn RadialProfile<T>,
    n: usize,
    r: T,
    e: T,
    rho: T,
    big_r: T,
    kinks: &[T],
    s: &QuadratureSpec<T>,
) -> Parts<T> {
    let gauss = GaussRule::<T>::new(s.gauss_order);
    let splits = shell_splits(r, kinks, rho, big_r);
    let edges = panel_edges(rho, big_r, rho, s.radial_levels, &splits);
    let nodes: Vec<(T, T)> = edges.windows(2).flat_map(|w| gauss.on(w[0], w[1]).collect::<Vec<_>>()).collect();
    let phi_r = p.phi(r);
    let two = lit::<T>(2.0);
    let per_quarter = (s.angular_points / 8).max(1);
    let tangential_div = T::from_count(n - 1);
    let vals: Vec<(T, T, T)> = nodes
        .par_iter()
        .map_init(Vec::new, |buf, &(t, wt)| {
            let cuts = angle_splits(r, t, kinks, T::zero(), T::FRAC_PI_2(), true);
            angular_nodes(&cuts, per_quarter, &gauss, buf);
            let (mut ar, mut at, mut ab) = (T::zero(), T::zero(), T::zero());
            for &(th, wth) in buf.iter() {
                let (sn, c) = th.sin_cos();
                let base = r * r + t * t;
                let cross = two * r * t * c;
                let fp = p.phi((base + cross).max(T::zero()).sqrt());
                let fm = p.phi((base - cross).max(T::zero()).sqrt());
                let d = fp + fm - phi_r - phi_r;
                let m = wth * sn.powi(n as i32 - 2);
                ar = ar + m * c * c * d;
                at = at + m * sn * sn / tangential_div * d;
                ab = ab + m * (fp.abs() + fm.abs() + two * phi_r.abs());
            }
            let k = wt * t.powf(-T::one() - e);
            (k * ar, k * at, k * ab)
        })
        .collect();
    let scale = two * sphere_area::<T>(n - 1);
    let (mut pr, mut pt, mut pa) = (T::zero(), T::zero(), T::zero());
    for (a, b, c) in vals {
        pr = pr + a;
        pt = pt + b;
        pa = pa + c;
    }
    Parts { radial: pr * scale, tangential: pt * scale, abs: pa * scale }
}

struct Reduced<T> {
    radial: T,
    tangential: T,
}

/// Shared driver: kernel `|y|^{-n-e}` applied to `delta`, returning radial
/// and tangential components (before the kernel constant).
fn reduce<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    r: T,
    e: T,
    scale: T,
    s: &QuadratureSpec<T>,
    trace_target: bool,
) -> Result<(Reduced<T>, ErrorParts<T>)> {
    let Some(p) = u.radial() else {
        return domain("radial reduction needs a radial field");
    };
    let n = u.dim();
    let x = on_axis(n, r);
    let near = near_origin(u, &x, s.r_inner)?;
    let (big_r, exact) = outer_radius(u, &x, s);
    let kinks = u.kink_radii();
    let fine = delta_parts(p, n, r, e, near.rho, big_r, &kinks, s);
    let coarse = delta_parts(p, n, r, e, near.rho, big_r, &kinks, &s.coarse());
    let area = sphere_area::<T>(n);
    let tail_exact = -lit::<T>(2.0) * p.phi(r) * area / T::from_count(n) * big_r.powf(-e) / e;
    let (mut jr, mut jt) = (fine.radial + tail_exact, fine.tangential + tail_exact);
    if let Some(m) = near.taylor_matrix(n, e) {
        jr = jr + m.get(0, 0);
        jt = jt + m.get(1, 1);
    }
    let tail = if exact { T::zero() } else { lit::<T>(2.0) * u.abs_bound_outside(big_r - r) * area * big_r.powf(-e) / e };
    let nb = near.bound(n, e);
    let ro = roundoff_floor(fine.abs);
    let nt = T::from_count(n - 1);
    let discretization = if trace_target {
        (fine.radial - coarse.radial + nt * (fine.tangential - coarse.tangential)).abs()
    } else {
        (fine.radial - coarse.radial).abs().max((fine.tangential - coarse.tangential).abs())
    };
    let parts = ErrorParts {
        discretization: discretization * scale,
        near_origin: nb * scale,
        tail: tail * scale,
        roundoff: ro * scale,
        scaling: near.scaling(e),
    };
    Ok((Reduced { radial: jr, tangential: jt }, parts))
}

fn frame<T: Real>(x: &[T], radial: T, tangential: T) -> SymMatrix<T> {
    let n = x.len();
    let r = norm(x);
    if r == T::zero() {
        return SymMatrix::scaled_identity(n, (radial + T::from_count(n - 1) * tangential) / T::from_count(n));
    }
    SymMatrix::from_fn(n, |i, j| {
        let xx = x[i] * x[j] / (r * r);
        let id = if i == j { T::one() } else { T::zero() };
        radial * xx + tangential * (id - xx)
    })
}

/// `D^sigma u(x)` for radial `u` via the two-dimensional `(t, theta)`
/// reduction; the result is `mu_r xhat xhat^T + mu_t (I - xhat xhat^T)`.
pub fn radial_reduce_hessian<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<MatrixEstimate<T>> {
    check_point(u, x, params, spec)?;
    if u.radial().is_none() {
        return domain("radial reduction needs a radial field");
    }
    let half_a = norm_const_neg(params.n, params.sigma)? / lit(2.0);
    let r = norm(x);
    let (red, parts) = refine_until(spec, |s| reduce(u, r, params.sigma, half_a, s, false))?;
    Ok(MatrixEstimate { value: frame(x, red.radial * half_a, red.tangential * half_a), err_bound: parts.total() })
}

/// The dual fractional Laplacian of a radial field via the `(t, theta)`
/// reduction.
pub fn radial_reduce_dual<T: Real, F: ScalarField<T> + ?Sized>(
    p: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    check_point(p, x, params, spec)?;
    if p.radial().is_none() {
        return domain("radial reduction needs a radial field");
    }
    let e = params.dual_order();
    let half_a = norm_const_neg(params.n, e)? / lit(2.0);
    let r = norm(x);
    let nt = T::from_count(params.n - 1);
    let (red, parts) = refine_until(spec, |s| reduce(p, r, e, half_a, s, true))?;
    Ok(Estimate { value: -(red.radial + nt * red.tangential) * half_a, err_bound: parts.total() })
}

/// The Riesz potential of a compactly supported radial density via the
/// `(t, theta)` reduction with `s = t^{2-sigma}`.
pub fn riesz_potential_radial<T: Real, F: ScalarField<T> + ?Sized>(
    v: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    check_point(v, x, params, spec)?;
    let (Some(p), Some(support)) = (v.radial(), v.support_radius()) else {
        return domain("radial Riesz potential needs a compactly supported radial density");
    };
    let n = params.n;
    let a = norm_const_pos(n, params.sigma)?;
    let e = params.dual_order();
    let r = norm(x);
    let kinks = v.kink_radii();
    let (value, parts) = refine_until(spec, |s| {
        let (fine, abs) = riesz_radial_sum(p, n, r, e, support, &kinks, s);
        let (coarse, _) = riesz_radial_sum(p, n, r, e, support, &kinks, &s.coarse());
        let parts = ErrorParts {
            discretization: (fine - coarse).abs() * a,
            roundoff: roundoff_floor(abs) * a,
            ..ErrorParts::zero()
        };
        Ok((fine * a, parts))
    })?;
    Ok(Estimate { value, err_bound: parts.total() })
}

fn riesz_radial_sum<T: Real>(
    p: &dyn RadialProfile<T>,
    n: usize,
    r: T,
    e: T,
    support: T,
    kinks: &[T],
    s: &QuadratureSpec<T>,
) -> (T, T) {
    let gauss = GaussRule::<T>::new(s.gauss_order);
    let t_hi = r + support;
    let t_lo = (r - support).max(T::zero());
    let splits: Vec<T> = shell_splits(r, kinks, t_lo, t_hi).into_iter().map(|t| t.powf(e)).collect();
    let (s_lo, s_hi) = (t_lo.powf(e), t_hi.powf(e));
    let anchor = if t_lo > T::zero() { s_lo } else { s_hi * lit(1e-6) };
    let edges = panel_edges(s_lo, s_hi, anchor, s.radial_levels, &splits);
    let nodes: Vec<(T, T)> = edges.windows(2).flat_map(|w| gauss.on(w[0], w[1]).collect::<Vec<_>>()).collect();
    let inv_e = T::one() / e;
    let per_quarter = (s.angular_points / 8).max(1);
    let two = lit::<T>(2.0);
    let vals: Vec<(T, T)> = nodes
        .par_iter()
        .map_init(Vec::new, |buf, &(sv, ws)| {
            let t = sv.powf(inv_e);
            let cuts = angle_splits(r, t, kinks, T::zero(), T::PI(), false);
            angular_nodes(&cuts, per_quarter, &gauss, buf);
            let (mut acc, mut abs) = (T::zero(), T::zero());
            for &(th, wth) in buf.iter() {
                let (sn, c) = th.sin_cos();
                let f = p.phi((r * r + t * t + two * r * t * c).max(T::zero()).sqrt());
                let m = wth * sn.powi(n as i32 - 2);
                acc = acc + m * f;
                abs = abs + m * f.abs();
            }
            (ws * acc, ws * abs)
        })
        .collect();
    let scale = sphere_area::<T>(n - 1) * inv_e;
    let (a, b) = vals.into_iter().fold((T::zero(), T::zero()), |(a, b), (c, d)| (a + c, b + d));
    (a * scale, b * scale)
}
