//! Quadrature for the singular integrals behind the fractional Hessian, the
//! dual fractional Laplacian and the Riesz potential.
//!
//! Every routine integrates in polar coordinates around the evaluation point
//! on geometric radial panels (Gauss-Legendre on each panel), splitting
//! panels where a ray crosses a sphere on which the field loses smoothness.
//! The reported error bound is the sum of
//!
//! * a discretization estimate: the change against a rule with half the
//!   radial and angular resolution,
//! * an analytic bound for the excised ball `B_{r_inner}` (Taylor remainder
//!   when the field provides a local jet, otherwise the `C^{1,1}` bound),
//! * an analytic bound for the part beyond the truncation radius,
//! * a floating point floor proportional to the absolute sum of all terms.
//!
//! When the bound exceeds `tol` the resolution is doubled and the inner
//! radius shrunk, up to `max_refine` times, after which an accuracy error is
//! returned.

mod dual;
mod gauss;
mod hessian;
mod radial;
mod riesz;

use serde::{Deserialize, Serialize};

pub use dual::{fractional_laplacian_dual, fractional_laplacian_dual_one_sided};
pub use gauss::{gauss_legendre, GaussRule};
pub use hessian::fractional_hessian;
pub use radial::{radial_reduce_dual, radial_reduce_hessian, riesz_potential_radial};
pub use riesz::riesz_potential;

use crate::error::{domain, Error, Result};
use crate::fields::{LocalJet, ScalarField};
use crate::matrixcore::SymMatrix;
use crate::real::{lit, norm, Real};
use crate::special::{sphere_area, KernelParams};

/// Resolution and accuracy target of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    /// Radius of the excised ball around the singularity.
    pub r_inner: T,
    /// Truncation radius for fields without compact support.
    pub r_outer: T,
    /// Radial panels per decade of the geometric grid.
    pub radial_levels: usize,
    /// Points per great circle of the angular rule.
    pub angular_points: usize,
    /// Absolute target for the certified error bound.
    pub tol: T,
    #[serde(default = "default_max_refine")]
    pub max_refine: usize,
    #[serde(default = "default_gauss_order")]
    pub gauss_order: usize,
}

fn default_max_refine() -> usize {
    3
}

fn default_gauss_order() -> usize {
    8
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            r_inner: lit(1e-4),
            r_outer: lit(1e3),
            radial_levels: 16,
            angular_points: 32,
            tol: lit(1e-4),
            max_refine: default_max_refine(),
            gauss_order: default_gauss_order(),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.r_inner > T::zero() && self.r_inner < self.r_outer) {
            return domain("quadrature radii must satisfy 0 < r_inner < r_outer");
        }
        if self.radial_levels < 8 {
            return domain("radial_levels must be at least 8");
        }
        let min_ang = if n == 2 { 8 } else { 26 };
        if self.angular_points < min_ang {
            return domain(format!("angular_points must be at least {min_ang} in dimension {n}"));
        }
        if !(self.tol > T::zero()) {
            return domain("tolerance must be positive");
        }
        if self.gauss_order < 2 {
            return domain("gauss_order must be at least 2");
        }
        if !(2..=3).contains(&n) {
            return domain("quadrature is implemented for n = 2, 3");
        }
        Ok(())
    }

    /// The next rung of the refinement ladder.
    pub fn refined(&self, shrink_inner: bool) -> Self {
        let mut s = *self;
        s.radial_levels *= 2;
        s.angular_points *= 2;
        if shrink_inner {
            s.r_inner = s.r_inner / lit(4.0);
        }
        s
    }

    fn coarse(&self) -> Self {
        let mut s = *self;
        s.radial_levels /= 2;
        s.angular_points /= 2;
        s
    }
}

/// A scalar with a certified error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub err_bound: T,
}

/// A symmetric matrix with a certified bound on the operator norm of its
/// error.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEstimate<T> {
    pub value: SymMatrix<T>,
    pub err_bound: T,
}

/// Components of an error bound, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorParts<T> {
    pub discretization: T,
    pub near_origin: T,
    pub tail: T,
    pub roundoff: T,
    /// Excised radius, near-origin power `p` and kernel power `e`, so that the
    /// near-origin part scales like `rho^p` and the roundoff like `rho^-e`.
    #[serde(skip)]
    pub(crate) scaling: Option<(T, T, T)>,
}

impl<T: Real> ErrorParts<T> {
    pub fn zero() -> Self {
        ErrorParts {
            discretization: T::zero(),
            near_origin: T::zero(),
            tail: T::zero(),
            roundoff: T::zero(),
            scaling: None,
        }
    }

    pub fn total(&self) -> T {
        self.discretization + self.near_origin + self.tail + self.roundoff
    }
}

/// Rounding allowance for the accumulated magnitude of all terms, assuming
/// field evaluations accurate to a few ulps.
pub(crate) fn roundoff_floor<T: Real>(abs_sum: T) -> T {
    lit::<T>(8.0) * T::epsilon() * abs_sum
}

/// How the ball `B_rho(x)` is accounted for.
#[derive(Debug, Clone)]
pub(crate) struct NearOrigin<T> {
    pub rho: T,
    /// Hessian at `x` when a Taylor term is added; `None` means the ball is
    /// dropped and only bounded.
    pub hessian: Option<SymMatrix<T>>,
    third: T,
    c11: T,
}

impl<T: Real> NearOrigin<T> {
    /// Bound (before the kernel constant) of the excised contribution for the
    /// kernel `|y|^{-n-e}` applied to `delta` (scalar or `y (x) y/|y|^2`
    /// weighted), after the Taylor term if present.
    pub fn bound(&self, n: usize, e: T) -> T {
        let s = sphere_area::<T>(n);
        match self.hessian {
            Some(_) => {
                let p = lit::<T>(3.0) - e;
                s * self.third / lit(3.0) * self.rho.powf(p) / p
            }
            None => {
                let p = lit::<T>(2.0) - e;
                s * self.c11 * self.rho.powf(p) / p
            }
        }
    }

    /// `(rho, p, e)` for [`ErrorParts::scaling`].
    pub fn scaling(&self, e: T) -> Option<(T, T, T)> {
        let p = if self.hessian.is_some() { lit::<T>(3.0) - e } else { lit::<T>(2.0) - e };
        Some((self.rho, p, e))
    }

    /// `int_{B_rho} (y^T H y) (y (x) y) |y|^{-n-2-e} dy`.
    pub fn taylor_matrix(&self, n: usize, e: T) -> Option<SymMatrix<T>> {
        let h = self.hessian.as_ref()?;
        let p = lit::<T>(2.0) - e;
        let nn = T::from_count(n);
        let c = self.rho.powf(p) / p * sphere_area::<T>(n) / (nn * (nn + lit(2.0)));
        let tr = h.trace();
        Some(&SymMatrix::scaled_identity(n, tr * c) + &h.scale(lit::<T>(2.0) * c))
    }

    /// `int_{B_rho} (y^T H y) |y|^{-n-e} dy`.
    pub fn taylor_scalar(&self, n: usize, e: T) -> Option<T> {
        let h = self.hessian.as_ref()?;
        let p = lit::<T>(2.0) - e;
        Some(self.rho.powf(p) / p * sphere_area::<T>(n) / T::from_count(n) * h.trace())
    }
}

/// Chooses the excised radius and the near-origin treatment at `x`.
pub(crate) fn near_origin<T: Real, F: ScalarField<T> + ?Sized>(u: &F, x: &[T], rho_max: T) -> Result<NearOrigin<T>> {
    let r = norm(x);
    let dist = u.kink_radii().iter().fold(T::infinity(), |m, &k| m.min((r - k).abs()));
    let rho_jet = rho_max.min(dist / lit(2.0));
    if rho_jet > T::zero() {
        if let Some(LocalJet { hessian, third_bound, .. }) = u.local_jet(x, rho_jet) {
            if third_bound.is_finite() {
                return Ok(NearOrigin { rho: rho_jet, hessian: Some(hessian), third: third_bound, c11: T::zero() });
            }
        }
    }
    match u.c11_seminorm() {
        Some(l) => Ok(NearOrigin { rho: rho_max, hessian: None, third: T::zero(), c11: l }),
        None => domain("field provides neither a local jet nor a C^{1,1} seminorm near the evaluation point"),
    }
}

/// Positive parameters `t` in `(lo, hi)` where `|c + t w| = k` for a kink
/// radius `k`, given `b = c . w` and `c2 = |c|^2`.
pub(crate) fn ray_crossings<T: Real>(b: T, c2: T, kinks: &[T], lo: T, hi: T, out: &mut Vec<T>) {
    for &k in kinks {
        let disc = b * b - c2 + k * k;
        if disc <= T::zero() {
            continue;
        }
        let sq = disc.sqrt();
        for t in [-b - sq, -b + sq] {
            if t > lo && t < hi {
                out.push(t);
            }
        }
    }
}

/// Panel edges on `[lo, hi]`: a geometric grid anchored at `anchor` with
/// `per_decade` panels per decade, the given split points, and dyadic
/// grading on both sides of each split.
pub(crate) fn panel_edges<T: Real>(lo: T, hi: T, anchor: T, per_decade: usize, splits: &[T]) -> Vec<T> {
    let q = lit::<T>(10.0).powf(T::one() / T::from_count(per_decade));
    let mut e = vec![lo, hi];
    let mut t = anchor;
    while t < hi {
        if t > lo {
            e.push(t);
        }
        t = t * q;
    }
    let mut t = anchor / q;
    while lo > T::zero() && t > lo {
        if t < hi {
            e.push(t);
        }
        t = t / q;
    }
    let width = q - T::one();
    for &s in splits {
        if !(s > lo && s < hi) {
            continue;
        }
        e.push(s);
        let mut g = s * width / lit(2.0);
        for _ in 0..8 {
            for c in [s - g, s + g] {
                if c > lo && c < hi {
                    e.push(c);
                }
            }
            g = g / lit(2.0);
        }
    }
    e.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let tiny = lit::<T>(1e-13);
    let mut out: Vec<T> = Vec::with_capacity(e.len());
    for v in e {
        match out.last() {
            Some(&p) if (v - p).abs() <= tiny * v.abs().max(T::min_positive_value()) => {}
            _ => out.push(v),
        }
    }
    if let Some(l) = out.last_mut() {
        *l = hi;
    }
    out
}

/// Direction rule for rays from `x`. In the plane, lines through `x` tangent
/// to a kink circle make the angular integrand singular, so the circle is cut
/// at those angles and each arc gets its own Gauss-Legendre rule; otherwise
/// this is [`sphere_rule`].
pub(crate) fn direction_rule<T: Real>(x: &[T], kinks: &[T], angular: usize, hemisphere: bool) -> Vec<(Vec<T>, T)> {
    let r = norm(x);
    if x.len() != 2 || !(r > T::zero()) {
        return sphere_rule(x.len(), angular, hemisphere);
    }
    let pi = T::PI();
    let period = if hemisphere { pi } else { pi + pi };
    let beta = x[1].atan2(x[0]);
    let mut cuts = Vec::new();
    for &k in kinks {
        if k > T::zero() && k <= r {
            let a = (k / r).min(T::one()).asin();
            for c in [beta + a, beta - a, beta + pi + a, beta + pi - a] {
                let m = c - period * (c / period).floor();
                cuts.push(if m >= period { T::zero() } else { m });
            }
        }
    }
    if cuts.is_empty() {
        return sphere_rule(2, angular, hemisphere);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    cuts.dedup_by(|a, b| (*a - *b).abs() <= lit(1e-14));
    let scale = if hemisphere { lit::<T>(2.0) } else { T::one() };
    let two_pi = pi + pi;
    let mut out = Vec::new();
    for (i, &a) in cuts.iter().enumerate() {
        let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + period };
        let len = b - a;
        if !(len > T::zero()) {
            continue;
        }
        let q = ((T::from_count(angular) * len / two_pi).ceil().to_f64_lossy() as usize).max(angular / 8).max(2);
        let g = GaussRule::<T>::new(q);
        for (th, wt) in g.on(a, b) {
            out.push((vec![th.cos(), th.sin()], scale * wt));
        }
    }
    out
}

/// Directions with weights integrating over the unit sphere; with
/// `hemisphere` only one of each antipodal pair is kept at double weight.
pub(crate) fn sphere_rule<T: Real>(n: usize, angular: usize, hemisphere: bool) -> Vec<(Vec<T>, T)> {
    let two_pi = T::PI() * lit(2.0);
    if n == 2 {
        if hemisphere {
            let m = angular + angular % 2;
            let w = two_pi / T::from_count(m) * lit(2.0);
            (0..m / 2)
                .map(|k| {
                    let a = two_pi * T::from_count(k) / T::from_count(m);
                    (vec![a.cos(), a.sin()], w)
                })
                .collect()
        } else {
            let m = angular + 1 - angular % 2;
            let w = two_pi / T::from_count(m);
            (0..m)
                .map(|k| {
                    let a = two_pi * (T::from_count(k) + lit(0.5)) / T::from_count(m);
                    (vec![a.cos(), a.sin()], w)
                })
                .collect()
        }
    } else if hemisphere {
        let m = angular + angular % 2;
        let q = 2 * angular.div_ceil(4).max(1);
        let g = GaussRule::<T>::new(q);
        let mut out = Vec::new();
        for (c, wc) in g.on(-T::one(), T::one()) {
            if c <= T::zero() {
                continue;
            }
            let s = (T::one() - c * c).sqrt();
            for k in 0..m {
                let a = two_pi * T::from_count(k) / T::from_count(m);
                out.push((vec![s * a.cos(), s * a.sin(), c], lit::<T>(2.0) * wc * two_pi / T::from_count(m)));
            }
        }
        out
    } else {
        let m = angular + 1 - angular % 2;
        let q = 2 * angular.div_ceil(4).max(1) + 1;
        let g = GaussRule::<T>::new(q);
        let mut out = Vec::new();
        for (c, wc) in g.on(-T::one(), T::one()) {
            let s = (T::one() - c * c).sqrt();
            for k in 0..m {
                let a = two_pi * (T::from_count(k) + lit(0.5)) / T::from_count(m);
                out.push((vec![s * a.cos(), s * a.sin(), c], wc * two_pi / T::from_count(m)));
            }
        }
        out
    }
}

pub(crate) fn check_point<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<()> {
    params.validate()?;
    spec.validate(params.n)?;
    if u.dim() != params.n {
        return Err(Error::Dimension { expected: params.n, got: u.dim() });
    }
    if x.len() != params.n {
        return Err(Error::Dimension { expected: params.n, got: x.len() });
    }
    if !u.sup_bound().is_finite() {
        return domain("field must be bounded");
    }
    Ok(())
}

/// Truncation radius and whether the cut is exact (compact support).
pub(crate) fn outer_radius<T: Real, F: ScalarField<T> + ?Sized>(u: &F, x: &[T], spec: &QuadratureSpec<T>) -> (T, bool) {
    match u.support_radius() {
        Some(s) => (norm(x) + s, true),
        None => (spec.r_outer.max(lit::<T>(2.0) * norm(x) + T::one()), false),
    }
}

/// Doubles the resolution when discretization dominates; otherwise moves the
/// excised radius to the minimizer of `c1 rho^p + c2 rho^-e` fitted to the
/// current near-origin and roundoff parts.
fn next_rung<T: Real>(s: &QuadratureSpec<T>, parts: &ErrorParts<T>) -> QuadratureSpec<T> {
    let quarter = s.tol / lit(4.0);
    let inner = parts.near_origin + parts.roundoff;
    let mut next = *s;
    if parts.discretization + parts.tail > quarter || inner <= parts.discretization {
        next = s.refined(false);
    }
    if inner <= quarter {
        return next;
    }
    match parts.scaling {
        Some((rho, p, e)) if parts.near_origin > T::zero() && parts.roundoff > T::zero() => {
            let c1 = parts.near_origin / rho.powf(p);
            let c2 = parts.roundoff * rho.powf(e);
            let best = (e * c2 / (p * c1)).powf(T::one() / (p + e));
            next.r_inner = if best < rho { best.max(rho / lit(16.0)) } else { best.min(rho * lit(16.0)) };
        }
        _ => next.r_inner = s.r_inner / lit(4.0),
    }
    next
}

/// Runs `attempt` along the refinement ladder until its bound meets `tol`.
pub(crate) fn refine_until<T: Real, R>(
    spec: &QuadratureSpec<T>,
    mut attempt: impl FnMut(&QuadratureSpec<T>) -> Result<(R, ErrorParts<T>)>,
) -> Result<(R, ErrorParts<T>)> {
    let mut s = *spec;
    let mut last = T::infinity();
    for k in 0..=spec.max_refine {
        let (r, parts) = attempt(&s)?;
        let total = parts.total();
        if total <= spec.tol {
            return Ok((r, parts));
        }
        last = total;
        if k < spec.max_refine {
            s = next_rung(&s, &parts);
        }
    }
    Err(Error::Accuracy { bound: last.to_f64_lossy(), tol: spec.tol.to_f64_lossy() })
}
