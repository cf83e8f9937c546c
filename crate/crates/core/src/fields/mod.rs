//! Scalar fields on `R^n` together with the analytic metadata the quadrature
//! layer needs to certify its error bounds.

mod infconv;
mod mollify;
mod profile;
mod spline;

use std::sync::Arc;

pub use infconv::{inf_convolution, semiconcavity_check, InfConvParams, InfConvolution, SemiconcavityReport};
pub use mollify::{mollifier_normalization, mollify, Mollified};
pub use profile::{
    c1_continuity_defect, radial_hessian, radial_third_bound, Bump, Linear, Quadratic, RadialField, RadialProfile,
};
pub use spline::{PowerTail, SplineProfile};

use crate::matrixcore::SymMatrix;
use crate::real::Real;

/// Second-order information valid on a ball `B_radius(x)`.
#[derive(Debug, Clone)]
pub struct LocalJet<T> {
    /// `D^2 u(x)`.
    pub hessian: SymMatrix<T>,
    /// Upper bound for the operator norm of `D^3 u` on the ball.
    pub third_bound: T,
    pub radius: T,
}

/// A bounded function on `R^n` with the metadata used for certified bounds.
///
/// `eval` must be pure and safe to call concurrently.
pub trait ScalarField<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[T]) -> T;

    /// Upper bound for `sup |u|`.
    fn sup_bound(&self) -> T;

    /// Radius of a centered ball containing the support, if finite.
    fn support_radius(&self) -> Option<T> {
        None
    }

    /// A constant `L` with `|delta(u, x, y)| <= L |y|^2` everywhere.
    fn c11_seminorm(&self) -> Option<T> {
        None
    }

    /// The radial profile when `u(x) = phi(|x|)`.
    fn radial(&self) -> Option<&dyn RadialProfile<T>> {
        None
    }

    /// Hessian at `x` and a third-derivative bound on `B_radius(x)`, when the
    /// field is `C^{2,1}` there.
    fn local_jet(&self, _x: &[T], _radius: T) -> Option<LocalJet<T>> {
        None
    }

    /// Radii of centered spheres across which the field loses smoothness.
    /// Quadrature rules split their panels there.
    fn kink_radii(&self) -> Vec<T> {
        self.support_radius().into_iter().collect()
    }

    /// Upper bound for `sup_{|z| >= radius} |u(z)|`.
    fn abs_bound_outside(&self, radius: T) -> T {
        match self.support_radius() {
            Some(r) if radius >= r => T::zero(),
            _ => self.sup_bound(),
        }
    }
}

macro_rules! forward_field {
    ($($ptr:ty),*) => {$(
        impl<T: Real, F: ScalarField<T> + ?Sized> ScalarField<T> for $ptr {
            fn dim(&self) -> usize { (**self).dim() }
            fn eval(&self, x: &[T]) -> T { (**self).eval(x) }
            fn sup_bound(&self) -> T { (**self).sup_bound() }
            fn support_radius(&self) -> Option<T> { (**self).support_radius() }
            fn c11_seminorm(&self) -> Option<T> { (**self).c11_seminorm() }
            fn radial(&self) -> Option<&dyn RadialProfile<T>> { (**self).radial() }
            fn local_jet(&self, x: &[T], radius: T) -> Option<LocalJet<T>> { (**self).local_jet(x, radius) }
            fn kink_radii(&self) -> Vec<T> { (**self).kink_radii() }
            fn abs_bound_outside(&self, radius: T) -> T { (**self).abs_bound_outside(radius) }
        }
    )*};
}

forward_field!(&F, Arc<F>, Box<F>);

/// `u(x + y) + u(x - y) - 2 u(x)`.
pub fn delta_second_diff<T: Real, F: ScalarField<T> + ?Sized>(u: &F, x: &[T], y: &[T]) -> T {
    let plus: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
    let minus: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    u.eval(&plus) + u.eval(&minus) - (u.eval(x) + u.eval(x))
}

type EvalFn<T> = dyn Fn(&[T]) -> T + Send + Sync;

/// A field given by a closure plus explicitly declared metadata.
#[derive(Clone)]
pub struct FnField<T> {
    dim: usize,
    f: Arc<EvalFn<T>>,
    sup: T,
    support: Option<T>,
    c11: Option<T>,
    kinks: Vec<T>,
}

impl<T: Real> FnField<T> {
    pub fn new(dim: usize, sup_bound: T, f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        FnField { dim, f: Arc::new(f), sup: sup_bound, support: None, c11: None, kinks: Vec::new() }
    }

    pub fn with_support(mut self, radius: T) -> Self {
        self.support = Some(radius);
        self
    }

    pub fn with_c11(mut self, l: T) -> Self {
        self.c11 = Some(l);
        self
    }

    /// Radii of centered spheres where the closure loses smoothness.
    pub fn with_kinks(mut self, kinks: Vec<T>) -> Self {
        self.kinks = kinks;
        self
    }
}

impl<T: Real> ScalarField<T> for FnField<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[T]) -> T {
        (self.f)(x)
    }
    fn sup_bound(&self) -> T {
        self.sup
    }
    fn support_radius(&self) -> Option<T> {
        self.support
    }
    fn c11_seminorm(&self) -> Option<T> {
        self.c11
    }
    fn kink_radii(&self) -> Vec<T> {
        let mut k = self.kinks.clone();
        k.extend(self.support.filter(|s| !self.kinks.contains(s)));
        k
    }
}

/// `u + a . x + b` for a compactly supported `u`; the affine part is
/// invisible to every second difference.
pub struct AffinePlus<F, T> {
    pub inner: F,
    pub slope: Vec<T>,
    pub offset: T,
    /// Region on which `sup_bound` is meaningful for the affine part.
    pub box_radius: T,
}

impl<T: Real, F: ScalarField<T>> ScalarField<T> for AffinePlus<F, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[T]) -> T {
        self.inner.eval(x) + crate::real::dot(&self.slope, x) + self.offset
    }
    fn sup_bound(&self) -> T {
        self.inner.sup_bound() + crate::real::norm(&self.slope) * self.box_radius + self.offset.abs()
    }
    fn c11_seminorm(&self) -> Option<T> {
        self.inner.c11_seminorm()
    }
    fn local_jet(&self, x: &[T], radius: T) -> Option<LocalJet<T>> {
        self.inner.local_jet(x, radius)
    }
    fn kink_radii(&self) -> Vec<T> {
        self.inner.kink_radii()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_difference_identities() {
        let q = FnField::new(3, 1.0_f64, |x: &[f64]| x.iter().map(|v| v * v).sum());
        let x = [0.3, -1.2, 0.5];
        let y = [0.25, 0.1, -0.4];
        let y2: f64 = y.iter().map(|v| v * v).sum();
        assert!((delta_second_diff(&q, &x, &y) - 2.0 * y2).abs() < 1e-14);

        let aff = FnField::new(3, 1.0_f64, |x: &[f64]| 2.0 * x[0] - x[1] + 0.5 * x[2] + 3.0);
        assert!(delta_second_diff(&aff, &x, &y).abs() < 1e-14);

        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let b = RadialField::new(3, Bump::new(1.0_f64, 1.0));
        assert_eq!(delta_second_diff(&b, &x, &y), delta_second_diff(&b, &x, &neg));
    }

    #[test]
    fn bump_second_difference_by_expansion() {
        // (1 - |x|^2)_+^2 at x = 0, y = (1/2, 0): 2 (3/4)^2 - 2 = -7/8.
        let b = RadialField::new(2, Bump::new(1.0_f64, 1.0));
        let d = delta_second_diff(&b, &[0.0, 0.0], &[0.5, 0.0]);
        assert!((d + 0.875).abs() < 1e-15);
    }
}
