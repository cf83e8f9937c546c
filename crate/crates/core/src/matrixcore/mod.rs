//! Symmetric matrices, the `A -> A_sigma` map, the ellipticity class and the
//! fractional Pucci extremal traces.

mod lp;
mod oracle;
mod sym;

pub use lp::{extremal_diagonal, pucci_extremal_trace, Extremal, Sign};
pub use oracle::{pucci_oracle_sample, random_orthogonal};
pub use sym::SymMatrix;

use crate::error::Result;
use crate::real::{lit, Real};
use crate::special::KernelParams;

/// Eigenvalue tolerance used by membership checks.
pub const CLASS_TOL: f64 = 1e-10;

/// `(sigma A + Tr(A) Id) / (n + sigma)`.
pub fn a_sigma_map<T: Real>(a: &SymMatrix<T>, p: &KernelParams<T>) -> Result<SymMatrix<T>> {
    a.check_dim(p.n)?;
    Ok(a_sigma_unchecked(a, p.sigma))
}

pub(crate) fn a_sigma_unchecked<T: Real>(a: &SymMatrix<T>, sigma: T) -> SymMatrix<T> {
    let n = a.dim();
    let tr = a.trace();
    let inv = (T::from_count(n) + sigma).recip();
    SymMatrix::from_fn(n, |i, j| {
        let diag = if i == j { tr } else { T::zero() };
        (sigma * a.get(i, j) + diag) * inv
    })
}

/// Membership in the ellipticity class: `A >= eta Id` and
/// `lambda Id <= A_sigma <= Lambda Id`, up to [`CLASS_TOL`].
pub fn in_class<T: Real>(a: &SymMatrix<T>, p: &KernelParams<T>) -> bool {
    in_class_within(a, p, lit::<T>(CLASS_TOL) * p.big_lambda.max(T::one()))
}

/// [`in_class`] with an explicit absolute slack on the eigenvalue bounds.
pub fn in_class_within<T: Real>(a: &SymMatrix<T>, p: &KernelParams<T>, tol: T) -> bool {
    if a.dim() != p.n {
        return false;
    }
    if a.min_eigenvalue() < p.eta - tol {
        return false;
    }
    let ev = a_sigma_unchecked(a, p.sigma).eigenvalues();
    ev[0] >= p.lambda - tol && ev[ev.len() - 1] <= p.big_lambda + tol
}

/// The class `S_{lambda, Lambda}` attached to a set of kernel parameters.
#[derive(Debug, Clone, Copy)]
pub struct EllipticityClass<T> {
    pub params: KernelParams<T>,
}

impl<T: Real> EllipticityClass<T> {
    pub fn new(params: KernelParams<T>) -> Self {
        EllipticityClass { params }
    }

    pub fn contains(&self, a: &SymMatrix<T>) -> bool {
        in_class(a, &self.params)
    }

    pub fn inf_trace(&self, d: &SymMatrix<T>) -> Result<T> {
        Ok(pucci_extremal_trace(d, &self.params, Sign::Minus)?.value)
    }

    pub fn sup_trace(&self, d: &SymMatrix<T>) -> Result<T> {
        Ok(pucci_extremal_trace(d, &self.params, Sign::Plus)?.value)
    }
}
