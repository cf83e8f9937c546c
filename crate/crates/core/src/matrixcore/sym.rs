use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Dense real symmetric `n x n` matrix, stored row-major in full.
///
/// Every constructor and mutator writes both `(i, j)` and `(j, i)`, so the
/// storage is exactly symmetric at all times.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, T::one())
    }

    pub fn scaled_identity(dim: usize, s: T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = s;
        }
        m
    }

    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetric part `(M + M^T) / 2` of a general row-major matrix.
    pub fn from_general(dim: usize, rows: &[T]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: rows.len() });
        }
        let half = lit::<T>(0.5);
        Ok(Self::from_fn(dim, |i, j| half * (rows[i * dim + j] + rows[j * dim + i])))
    }

    /// `y (x) y`.
    pub fn outer(y: &[T]) -> Self {
        Self::from_fn(y.len(), |i, j| y[i] * y[j])
    }

    /// `V diag(values) V^T` with `vectors[k]` the k-th column of `V`.
    pub fn from_eigen(values: &[T], vectors: &[Vec<T>]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            (0..n).map(|k| values[k] * vectors[k][i] * vectors[k][j]).sum()
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: T) -> Self {
        SymMatrix { dim: self.dim, data: self.data.iter().map(|&v| v * s).collect() }
    }

    /// `Tr(self * other)`, the Frobenius inner product.
    pub fn trace_product(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn frobenius(&self) -> T {
        self.trace_product(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn max_off_diagonal(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    pub fn quad_form(&self, y: &[T]) -> T {
        let n = self.dim;
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                s = s + y[i] * self.data[i * n + j] * y[j];
            }
        }
        s
    }

    /// `Q^T self Q` for `Q` given row-major.
    pub fn conjugate(&self, q: &[T]) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            let mut s = T::zero();
            for k in 0..n {
                let qki = q[k * n + i];
                if qki == T::zero() {
                    continue;
                }
                for l in 0..n {
                    s = s + qki * self.data[k * n + l] * q[l * n + j];
                }
            }
            s
        })
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim != n {
            return Err(Error::Dimension { expected: n, got: self.dim });
        }
        Ok(())
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors by cyclic Jacobi
    /// rotations. `vectors[k]` pairs with `values[k]`.
    pub fn eigen(&self) -> (Vec<T>, Vec<Vec<T>>) {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut v = vec![T::zero(); n * n];
        for i in 0..n {
            v[i * n + i] = T::one();
        }
        let scale = self.max_abs();
        let eps = T::epsilon();
        for _sweep in 0..64 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off + a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() <= eps * eps * scale || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = (t * t + T::one()).sqrt().recip();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| a[i * n + i]).collect();
        let vectors = order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect();
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().0
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        *self.eigenvalues().last().expect("nonempty matrix")
    }
}

impl<T: Real> Add for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: Self) -> SymMatrix<T> {
        SymMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: Self) -> SymMatrix<T> {
        SymMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl<T: Real> Neg for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn neg(self) -> SymMatrix<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn mul(self, s: T) -> SymMatrix<T> {
        self.scale(s)
    }
}

impl<T: fmt::Debug> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.dim.max(1)).collect();
        f.debug_struct("SymMatrix").field("dim", &self.dim).field("rows", &rows).finish()
    }
}
