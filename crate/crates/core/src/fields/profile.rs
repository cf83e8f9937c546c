use super::{LocalJet, ScalarField};
use crate::error::{domain, Result};
use crate::matrixcore::SymMatrix;
use crate::real::{lit, norm, Real};

/// Profile `phi` of a radial function `u(x) = phi(|x|)`.
pub trait RadialProfile<T: Real>: Send + Sync {
    fn phi(&self, r: T) -> T;
    fn dphi(&self, r: T) -> T;
    fn ddphi(&self, r: T) -> T;

    /// Radii where the profile is only piecewise defined.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }

    fn support(&self) -> Option<T> {
        None
    }

    /// Upper bound for `sup |phi|`.
    fn sup_abs(&self) -> T;

    /// Upper bound for `sup_{s >= radius} |phi(s)|`.
    fn abs_bound_from(&self, radius: T) -> T {
        match self.support() {
            Some(s) if radius >= s => T::zero(),
            _ => self.sup_abs(),
        }
    }

    /// Upper bound for `sup ||D^2 u||` (a two-sided `C^{1,1}` constant).
    fn c11(&self) -> Option<T> {
        None
    }

    /// True when `phi` is nondecreasing.
    fn monotone(&self) -> bool {
        false
    }

    /// Bound for `||D^3 u||` on the annulus `lo <= |z| <= hi`, provided no
    /// breakpoint lies in `[lo, hi]`.
    fn d3_bound(&self, _lo: T, _hi: T) -> Option<T> {
        None
    }

    fn phi_left(&self, r: T) -> T {
        self.phi(r * (T::one() - lit::<T>(4.0) * T::epsilon()))
    }

    fn dphi_left(&self, r: T) -> T {
        self.dphi(r * (T::one() - lit::<T>(4.0) * T::epsilon()))
    }
}

/// Largest jumps of `phi` and `phi'` across the breakpoints.
pub fn c1_continuity_defect<T: Real, P: RadialProfile<T> + ?Sized>(p: &P) -> (T, T) {
    let mut jump = T::zero();
    let mut slope = T::zero();
    for b in p.breakpoints() {
        jump = jump.max((p.phi(b) - p.phi_left(b)).abs());
        slope = slope.max((p.dphi(b) - p.dphi_left(b)).abs());
    }
    (jump, slope)
}

/// `D^2 u(x) = phi''(r) xhat xhat^T + phi'(r)/r (I - xhat xhat^T)` for `x != 0`.
pub fn radial_hessian<T: Real, P: RadialProfile<T> + ?Sized>(p: &P, x: &[T]) -> Result<SymMatrix<T>> {
    if norm(x) == T::zero() {
        return domain("radial Hessian is undefined at the origin");
    }
    Ok(radial_hessian_or_center(p, x))
}

/// As [`radial_hessian`], returning `phi''(0) I` at the origin (valid when
/// `phi'(0) = 0`).
pub(crate) fn radial_hessian_or_center<T: Real, P: RadialProfile<T> + ?Sized>(p: &P, x: &[T]) -> SymMatrix<T> {
    let n = x.len();
    let r = norm(x);
    if r == T::zero() {
        return SymMatrix::scaled_identity(n, p.ddphi(T::zero()));
    }
    let radial = p.ddphi(r);
    let tangential = p.dphi(r) / r;
    SymMatrix::from_fn(n, |i, j| {
        let xx = x[i] * x[j] / (r * r);
        let id = if i == j { T::one() } else { T::zero() };
        radial * xx + tangential * (id - xx)
    })
}

/// Bound for `||D^3 u||` on `lo <= |z| <= hi` from bounds on `|phi'|`,
/// `|phi''|`, `|phi'''|` over `[lo, hi]`.
///
/// With `smooth_from_origin` the profile must be `C^{2,1}` on `[0, hi]` with
/// `phi'(0) = 0` and `f3` must bound `|phi'''|` on all of `[0, hi]`.
pub fn radial_third_bound<T: Real>(lo: T, f1: T, f2: T, f3: T, smooth_from_origin: bool) -> T {
    let c = T::one() + T::SQRT_2();
    let origin = f3 * (T::one() + c / lit(2.0));
    if smooth_from_origin {
        if lo > T::zero() {
            origin.min(f3 + c * (f2 + f1 / lo) / lo)
        } else {
            origin
        }
    } else if lo > T::zero() {
        f3 + c * (f2 + f1 / lo) / lo
    } else {
        T::infinity()
    }
}

/// `amp * (1 - (r/R)^2)_+^2`.
#[derive(Debug, Clone, Copy)]
pub struct Bump<T> {
    pub amp: T,
    pub radius: T,
}

impl<T: Real> Bump<T> {
    pub fn new(amp: T, radius: T) -> Self {
        Bump { amp, radius }
    }
}

impl<T: Real> RadialProfile<T> for Bump<T> {
    fn phi(&self, r: T) -> T {
        let s = r / self.radius;
        if s >= T::one() {
            T::zero()
        } else {
            let w = T::one() - s * s;
            self.amp * w * w
        }
    }
    fn dphi(&self, r: T) -> T {
        let s = r / self.radius;
        if s >= T::one() {
            T::zero()
        } else {
            -lit::<T>(4.0) * self.amp * s * (T::one() - s * s) / self.radius
        }
    }
    fn ddphi(&self, r: T) -> T {
        let s = r / self.radius;
        if s >= T::one() {
            T::zero()
        } else {
            -lit::<T>(4.0) * self.amp * (T::one() - lit::<T>(3.0) * s * s) / (self.radius * self.radius)
        }
    }
    fn breakpoints(&self) -> Vec<T> {
        vec![self.radius]
    }
    fn support(&self) -> Option<T> {
        Some(self.radius)
    }
    fn sup_abs(&self) -> T {
        self.amp.abs()
    }
    fn c11(&self) -> Option<T> {
        Some(lit::<T>(8.0) * self.amp.abs() / (self.radius * self.radius))
    }
    fn monotone(&self) -> bool {
        self.amp <= T::zero()
    }
    fn d3_bound(&self, lo: T, hi: T) -> Option<T> {
        if lo >= self.radius {
            Some(T::zero())
        } else if hi < self.radius {
            let r2 = self.radius * self.radius;
            Some(lit::<T>(24.0) * self.amp.abs() * hi / (r2 * r2))
        } else {
            None
        }
    }
}

/// `a r^2 / 2`; unbounded, for pointwise Hessian checks only.
#[derive(Debug, Clone, Copy)]
pub struct Quadratic<T> {
    pub a: T,
}

impl<T: Real> RadialProfile<T> for Quadratic<T> {
    fn phi(&self, r: T) -> T {
        self.a * r * r / lit(2.0)
    }
    fn dphi(&self, r: T) -> T {
        self.a * r
    }
    fn ddphi(&self, _r: T) -> T {
        self.a
    }
    fn sup_abs(&self) -> T {
        T::infinity()
    }
    fn c11(&self) -> Option<T> {
        Some(self.a.abs())
    }
    fn monotone(&self) -> bool {
        self.a >= T::zero()
    }
    fn d3_bound(&self, _lo: T, _hi: T) -> Option<T> {
        Some(T::zero())
    }
}

/// `slope * r`; unbounded and singular at the origin.
#[derive(Debug, Clone, Copy)]
pub struct Linear<T> {
    pub slope: T,
}

impl<T: Real> RadialProfile<T> for Linear<T> {
    fn phi(&self, r: T) -> T {
        self.slope * r
    }
    fn dphi(&self, _r: T) -> T {
        self.slope
    }
    fn ddphi(&self, _r: T) -> T {
        T::zero()
    }
    fn sup_abs(&self) -> T {
        T::infinity()
    }
    fn monotone(&self) -> bool {
        self.slope >= T::zero()
    }
}

/// The radial function `x -> phi(|x|)` in `n` dimensions.
#[derive(Debug, Clone)]
pub struct RadialField<P> {
    dim: usize,
    profile: P,
}

impl<P> RadialField<P> {
    pub fn new(dim: usize, profile: P) -> Self {
        RadialField { dim, profile }
    }

    pub fn profile(&self) -> &P {
        &self.profile
    }
}

impl<T: Real, P: RadialProfile<T>> ScalarField<T> for RadialField<P> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[T]) -> T {
        self.profile.phi(norm(x))
    }
    fn sup_bound(&self) -> T {
        self.profile.sup_abs()
    }
    fn support_radius(&self) -> Option<T> {
        self.profile.support()
    }
    fn c11_seminorm(&self) -> Option<T> {
        self.profile.c11()
    }
    fn radial(&self) -> Option<&dyn RadialProfile<T>> {
        Some(&self.profile)
    }
    fn local_jet(&self, x: &[T], radius: T) -> Option<LocalJet<T>> {
        let r = norm(x);
        let lo = (r - radius).max(T::zero());
        let hi = r + radius;
        if self.profile.breakpoints().iter().any(|&b| b >= lo && b <= hi) {
            return None;
        }
        let third_bound = self.profile.d3_bound(lo, hi)?;
        Some(LocalJet { hessian: radial_hessian_or_center(&self.profile, x), third_bound, radius })
    }
    fn abs_bound_outside(&self, radius: T) -> T {
        self.profile.abs_bound_from(radius)
    }
    fn kink_radii(&self) -> Vec<T> {
        let mut k = self.profile.breakpoints();
        if let Some(s) = self.profile.support() {
            if !k.contains(&s) {
                k.push(s);
            }
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_hessian(u: &impl ScalarField<f64>, x: &[f64], h: f64) -> SymMatrix<f64> {
        let n = x.len();
        SymMatrix::from_fn(n, |i, j| {
            let e = |si: f64, sj: f64| {
                let mut z = x.to_vec();
                z[i] += si * h;
                z[j] += sj * h;
                u.eval(&z)
            };
            (e(1.0, 1.0) - e(1.0, -1.0) - e(-1.0, 1.0) + e(-1.0, -1.0)) / (4.0 * h * h)
        })
    }

    #[test]
    fn radial_hessian_matches_finite_differences() {
        let u = RadialField::new(3, Bump::new(-1.3, 0.9));
        let x = [0.2, -0.35, 0.1];
        let exact = radial_hessian(u.profile(), &x).unwrap();
        let fd = fd_hessian(&u, &x, 1e-4);
        assert!((&exact - &fd).max_abs() < 1e-6);
        let q = RadialField::new(2, Quadratic { a: 2.5 });
        let hq = radial_hessian(q.profile(), &[0.3, 0.4]).unwrap();
        assert!((&hq - &SymMatrix::scaled_identity(2, 2.5)).max_abs() < 1e-14);
        assert!(radial_hessian(q.profile(), &[0.0, 0.0]).is_err());
        let l = radial_hessian(&Linear { slope: 1.0_f64 }, &[0.0, 2.0]).unwrap();
        assert!((l.get(0, 0) - 0.5).abs() < 1e-15 && l.get(1, 1).abs() < 1e-15);
    }

    #[test]
    fn bump_is_c1_across_its_support() {
        let (j, s) = c1_continuity_defect(&Bump::new(1.0, 1.0));
        assert!(j < 1e-12 && s < 1e-12);
    }

    #[test]
    fn bump_c11_constant_bounds_second_differences() {
        let u = RadialField::new(2, Bump::new(1.0, 1.0));
        let l = u.c11_seminorm().unwrap();
        for k in 0..200 {
            let t = k as f64 * 0.0137;
            let x = [0.7 * t.cos(), 0.4 * (1.3 * t).sin()];
            let y = [0.3 * (2.0 * t).sin(), 0.5 * t.cos()];
            let d = super::super::delta_second_diff(&u, &x, &y);
            let y2 = y[0] * y[0] + y[1] * y[1];
            assert!(d.abs() <= l * y2 + 1e-14);
        }
    }

    #[test]
    fn bump_jet_third_bound_controls_taylor_remainder() {
        let u = RadialField::new(3, Bump::new(1.0, 1.0));
        let x = [0.1, 0.2, -0.1];
        let jet = u.local_jet(&x, 0.2).unwrap();
        let y = [0.1_f64, -0.05, 0.12];
        let y3 = norm(&y).powi(3);
        let d = super::super::delta_second_diff(&u, &x, &y);
        assert!((d - jet.hessian.quad_form(&y)).abs() <= jet.third_bound * y3 / 3.0);
        assert!(u.local_jet(&[0.9, 0.0, 0.0], 0.2).is_none());
    }
}
