use super::{LocalJet, ScalarField};
use crate::error::{domain, Result};
use crate::matrixcore::SymMatrix;
use crate::quad::GaussRule;
use crate::real::{lit, Real};
use crate::special::sphere_area;

fn bump_kernel<T: Real>(s: T) -> T {
    if s >= T::one() {
        T::zero()
    } else {
        (-T::one() / (T::one() - s * s)).exp()
    }
}

/// `int_{B_1} exp(-1/(1-|x|^2)) dx` in `n` dimensions.
pub fn mollifier_normalization<T: Real>(n: usize) -> T {
    let g = GaussRule::<T>::new(20);
    let panels = 32;
    let mut acc = T::zero();
    for k in 0..panels {
        let a = T::from_count(k) / T::from_count(panels);
        let b = T::from_count(k + 1) / T::from_count(panels);
        acc = acc + g.integrate(a, b, |r| bump_kernel(r) * r.powi(n as i32 - 1));
    }
    acc * sphere_area::<T>(n)
}

/// Convolution of `u` with `eps^{-n} phi(./eps)` for the normalized bump
/// `phi`, evaluated by a fixed product rule whose weights are rescaled to
/// total mass one.
#[derive(Clone)]
pub struct Mollified<F, T> {
    inner: F,
    epsilon: T,
    offsets: Vec<Vec<T>>,
    weights: Vec<T>,
    mass_defect: T,
}

/// Mollification with the default rule (8 radial Gauss nodes, 16 angular
/// points per circle).
pub fn mollify<T: Real, F: ScalarField<T>>(u: F, epsilon: T) -> Result<Mollified<F, T>> {
    Mollified::with_resolution(u, epsilon, 8, 16)
}

impl<T: Real, F: ScalarField<T>> Mollified<F, T> {
    pub fn with_resolution(u: F, epsilon: T, radial: usize, angular: usize) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return domain("mollification radius must be positive");
        }
        let n = u.dim();
        if !(2..=3).contains(&n) {
            return domain("mollification is implemented for n = 2, 3");
        }
        if radial < 1 || angular < 4 {
            return domain("mollifier rule too coarse");
        }
        let dirs = sphere_rule::<T>(n, angular);
        let g = GaussRule::<T>::new(radial);
        let scale = mollifier_normalization::<T>(n) * epsilon.powi(n as i32) / sphere_area::<T>(n);
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        for (s, ws) in g.on(T::zero(), T::one()) {
            let radial_w = ws * bump_kernel(s) * s.powi(n as i32 - 1) * epsilon.powi(n as i32) / scale;
            for (d, wd) in &dirs {
                offsets.push(d.iter().map(|&c| c * s * epsilon).collect());
                weights.push(radial_w * *wd);
            }
        }
        let total: T = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        Ok(Mollified { inner: u, epsilon, offsets, weights, mass_defect: (total - T::one()).abs() })
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Offsets `z_k` and weights `w_k` with `u_eps(x) = sum_k w_k u(x - z_k)`.
    pub fn rule(&self) -> impl Iterator<Item = (&[T], T)> {
        self.offsets.iter().map(|v| v.as_slice()).zip(self.weights.iter().copied())
    }

    /// Deviation of the unnormalized discrete mass from one.
    pub fn mass_defect(&self) -> T {
        self.mass_defect
    }
}

/// Directions and weights summing to one on the unit sphere.
fn sphere_rule<T: Real>(n: usize, angular: usize) -> Vec<(Vec<T>, T)> {
    let two_pi = T::PI() * lit(2.0);
    let m = T::from_count(angular);
    if n == 2 {
        (0..angular)
            .map(|k| {
                let a = two_pi * (T::from_count(k) + lit(0.5)) / m;
                (vec![a.cos(), a.sin()], T::one() / m)
            })
            .collect()
    } else {
        let g = GaussRule::<T>::new(angular.div_ceil(2));
        let mut out = Vec::new();
        for (c, wc) in g.on(-T::one(), T::one()) {
            let s = (T::one() - c * c).max(T::zero()).sqrt();
            for k in 0..angular {
                let a = two_pi * (T::from_count(k) + lit(0.5)) / m;
                out.push((vec![s * a.cos(), s * a.sin(), c], wc / (lit::<T>(2.0) * m)));
            }
        }
        out
    }
}

impl<T: Real, F: ScalarField<T>> ScalarField<T> for Mollified<F, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[T]) -> T {
        let mut y = x.to_vec();
        let mut acc = T::zero();
        for (z, &w) in self.offsets.iter().zip(&self.weights) {
            for i in 0..x.len() {
                y[i] = x[i] - z[i];
            }
            acc = acc + w * self.inner.eval(&y);
        }
        acc
    }
    fn sup_bound(&self) -> T {
        self.inner.sup_bound()
    }
    fn support_radius(&self) -> Option<T> {
        self.inner.support_radius().map(|r| r + self.epsilon)
    }
    fn c11_seminorm(&self) -> Option<T> {
        self.inner.c11_seminorm()
    }
    fn local_jet(&self, x: &[T], radius: T) -> Option<LocalJet<T>> {
        let n = x.len();
        let mut hessian = SymMatrix::zeros(n);
        let mut third = T::zero();
        let mut y = x.to_vec();
        for (z, &w) in self.offsets.iter().zip(&self.weights) {
            for i in 0..n {
                y[i] = x[i] - z[i];
            }
            let jet = self.inner.local_jet(&y, radius)?;
            hessian = &hessian + &jet.hessian.scale(w);
            third = third.max(jet.third_bound);
        }
        Some(LocalJet { hessian, third_bound: third, radius })
    }
    fn abs_bound_outside(&self, radius: T) -> T {
        self.inner.abs_bound_outside((radius - self.epsilon).max(T::zero()))
    }
}
