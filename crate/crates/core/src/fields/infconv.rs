use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{delta_second_diff, ScalarField};
use crate::error::{domain, Error, Result};
use crate::real::{lit, Real};

/// Parameters of the grid inf-convolution and of the subsequent mollification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfConvParams<T> {
    pub h: T,
    /// Mollification radius used for the standard modification.
    pub epsilon: T,
    pub search_radius: T,
    pub grid_step: T,
    /// Number of local refinement passes, each dividing the step by 4.
    #[serde(default = "default_refine")]
    pub refine_levels: usize,
}

fn default_refine() -> usize {
    3
}

impl<T: Real> InfConvParams<T> {
    /// Search radius `2 sqrt(h sup|u|) + 3 grid_step`.
    pub fn for_bound(h: T, epsilon: T, grid_step: T, sup_bound: T) -> Self {
        InfConvParams {
            h,
            epsilon,
            search_radius: lit::<T>(2.0) * (h * sup_bound).sqrt() + lit::<T>(3.0) * grid_step,
            grid_step,
            refine_levels: default_refine(),
        }
    }

    pub fn validate(&self, sup_bound: T) -> Result<()> {
        if !(self.h > T::zero() && self.epsilon > T::zero() && self.grid_step > T::zero()) {
            return domain("h, epsilon and grid_step must be positive");
        }
        if !sup_bound.is_finite() {
            return domain("inf-convolution needs a bounded field");
        }
        let need = lit::<T>(2.0) * (self.h * sup_bound).sqrt() + self.grid_step;
        if self.search_radius < need {
            return Err(Error::Resolution(format!(
                "search radius {} does not cover the argmin ball (needs {})",
                self.search_radius, need
            )));
        }
        Ok(())
    }

    /// Excess of the squared argmin displacement over `4 h sup|u|` that the
    /// grid can produce.
    pub fn displacement_slack(&self, sup_bound: T) -> T {
        let r = lit::<T>(2.0) * (self.h * sup_bound).sqrt();
        lit::<T>(2.0) * r * self.grid_step + self.grid_step * self.grid_step
    }
}

/// `u_h(x) = min_y u(y) + |x - y|^2 / (2h)` over the lattice `x + grid_step Z^n`
/// inside the search ball, followed by local refinement around the best
/// candidates. The point `y = x` is always a candidate, so `u_h <= u`.
pub struct InfConvolution<F, T> {
    inner: F,
    params: InfConvParams<T>,
    offsets: Vec<T>,
}

const CANDIDATES: usize = 4;

/// Builds `u_h`; fails with a resolution error when the search ball is too
/// small for `sup|u|`.
pub fn inf_convolution<T: Real, F: ScalarField<T>>(u: F, params: InfConvParams<T>) -> Result<InfConvolution<F, T>> {
    params.validate(u.sup_bound())?;
    let n = u.dim();
    let kmax = (params.search_radius / params.grid_step).floor().to_f64_lossy() as i64;
    let r2 = params.search_radius * params.search_radius;
    let mut offsets = Vec::new();
    let mut idx = vec![-kmax; n];
    loop {
        let p: Vec<T> = idx.iter().map(|&k| lit::<T>(k as f64) * params.grid_step).collect();
        if p.iter().map(|&v| v * v).sum::<T>() <= r2 {
            offsets.extend_from_slice(&p);
        }
        let mut d = 0;
        while d < n {
            idx[d] += 1;
            if idx[d] <= kmax {
                break;
            }
            idx[d] = -kmax;
            d += 1;
        }
        if d == n {
            break;
        }
    }
    Ok(InfConvolution { inner: u, params, offsets })
}

impl<T: Real, F: ScalarField<T>> InfConvolution<F, T> {
    pub fn params(&self) -> &InfConvParams<T> {
        &self.params
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    fn objective(&self, x: &[T], z: &[T], buf: &mut [T]) -> T {
        for i in 0..x.len() {
            buf[i] = x[i] + z[i];
        }
        let z2: T = z.iter().map(|&v| v * v).sum();
        self.inner.eval(buf) + z2 / (lit::<T>(2.0) * self.params.h)
    }

    fn search(&self, x: &[T]) -> (T, Vec<T>) {
        let n = x.len();
        let mut buf = vec![T::zero(); n];
        let mut best: Vec<(T, usize)> = Vec::with_capacity(CANDIDATES + 1);
        for (k, z) in self.offsets.chunks_exact(n).enumerate() {
            let v = self.objective(x, z, &mut buf);
            if best.len() < CANDIDATES || v < best[best.len() - 1].0 {
                let pos = best.iter().position(|b| v < b.0).unwrap_or(best.len());
                best.insert(pos, (v, k));
                best.truncate(CANDIDATES);
            }
        }
        let mut overall = (T::infinity(), vec![T::zero(); n]);
        let quarter = lit::<T>(0.25);
        for &(v0, k) in &best {
            let mut center = self.offsets[k * n..(k + 1) * n].to_vec();
            let mut value = v0;
            let mut step = self.params.grid_step;
            for _ in 0..self.params.refine_levels {
                step = step * quarter;
                let mut j = vec![-4i32; n];
                let base = center.clone();
                loop {
                    let z: Vec<T> = base.iter().zip(&j).map(|(&c, &ji)| c + lit::<T>(ji as f64) * step).collect();
                    let v = self.objective(x, &z, &mut buf);
                    if v < value {
                        value = v;
                        center = z;
                    }
                    let mut d = 0;
                    while d < n {
                        j[d] += 1;
                        if j[d] <= 4 {
                            break;
                        }
                        j[d] = -4;
                        d += 1;
                    }
                    if d == n {
                        break;
                    }
                }
            }
            if value < overall.0 {
                overall = (value, center);
            }
        }
        (overall.0, x.iter().zip(&overall.1).map(|(&a, &b)| a + b).collect())
    }

    /// Minimal value and minimizer `y` at `x`.
    pub fn argmin(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        let (v, y) = self.search(x);
        let d = x.iter().zip(&y).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
        if d > self.params.search_radius - self.params.grid_step {
            return Err(Error::Resolution(format!("argmin at distance {d} reaches the search boundary")));
        }
        Ok((v, y))
    }

    /// Evaluates at many points in parallel, in input order.
    pub fn eval_many(&self, xs: &[Vec<T>]) -> Vec<T> {
        xs.par_iter().map(|x| self.search(x).0).collect()
    }
}

impl<T: Real, F: ScalarField<T>> ScalarField<T> for InfConvolution<F, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[T]) -> T {
        self.search(x).0
    }
    fn sup_bound(&self) -> T {
        self.inner.sup_bound()
    }
    fn support_radius(&self) -> Option<T> {
        self.inner.support_radius().map(|r| r + self.params.search_radius)
    }
    fn c11_seminorm(&self) -> Option<T> {
        let l = self.inner.c11_seminorm()?;
        let hl = self.params.h * l;
        (hl < T::one()).then(|| (T::one() / self.params.h).max(l / (T::one() - hl)))
    }
}

/// Outcome of a sampled semiconcavity check.
#[derive(Debug, Clone, Serialize)]
pub struct SemiconcavityReport {
    pub samples: usize,
    /// `max(0, max(delta(u_h, x, y) - |y|^2 / h))` over the samples.
    pub max_violation: f64,
    /// Samples exceeding `tol`.
    pub violations: usize,
    pub tol: f64,
}

/// Samples `x` uniformly in `[-box_radius, box_radius]^n` and `y` uniformly
/// in the ball of radius `box_radius / 2`, and compares
/// `delta(u_h, x, y)` with `|y|^2 / h`.
pub fn semiconcavity_check<T: Real, F: ScalarField<T> + ?Sized>(
    u_h: &F,
    h: T,
    samples: usize,
    seed: u64,
    box_radius: T,
    tol: T,
) -> SemiconcavityReport {
    let n = u_h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = box_radius.to_f64_lossy();
    let pairs: Vec<(Vec<T>, Vec<T>)> = (0..samples)
        .map(|_| {
            let x: Vec<T> = (0..n).map(|_| lit(rng.random_range(-b..b))).collect();
            let y = loop {
                let y: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5 * b..0.5 * b)).collect();
                if y.iter().map(|v| v * v).sum::<f64>() <= 0.25 * b * b {
                    break y.into_iter().map(lit).collect::<Vec<T>>();
                }
            };
            (x, y)
        })
        .collect();
    let excess: Vec<T> = pairs
        .par_iter()
        .map(|(x, y)| {
            let y2: T = y.iter().map(|&v| v * v).sum();
            delta_second_diff(u_h, x, y) - y2 / h
        })
        .collect();
    let max_violation = excess.iter().fold(T::zero(), |m, &e| m.max(e));
    SemiconcavityReport {
        samples,
        max_violation: max_violation.to_f64_lossy(),
        violations: excess.iter().filter(|&&e| e > tol).count(),
        tol: tol.to_f64_lossy(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Bump, FnField, RadialField};
    use super::*;

    #[test]
    fn zero_field_is_fixed() {
        let z = FnField::new(2, 0.0_f64, |_x: &[f64]| 0.0);
        let p = InfConvParams::for_bound(0.1, 0.05, 0.02, 0.0);
        let uh = inf_convolution(z, p).unwrap();
        let (v, y) = uh.argmin(&[0.3, -0.2]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(y, vec![0.3, -0.2]);
        let r = semiconcavity_check(&uh, 0.1, 200, 1, 1.0, 0.0);
        assert_eq!(r.max_violation, 0.0);
    }

    #[test]
    fn quadratic_matches_closed_form() {
        let h = 0.1;
        let q = FnField::new(2, 1.0_f64, |x: &[f64]| x[0] * x[0] + x[1] * x[1]).with_support(1.0);
        let p = InfConvParams { h, epsilon: 0.05, search_radius: 0.7, grid_step: 0.02, refine_levels: 3 };
        let uh = inf_convolution(q, p).unwrap();
        for x in [[0.3, 0.1], [-0.25, 0.4], [0.0, 0.0]] {
            let r2 = x[0] * x[0] + x[1] * x[1];
            assert!((uh.eval(&x) - r2 / (1.0 + 2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn lies_below_and_displacement_is_bounded() {
        let u = RadialField::new(2, Bump::new(-1.0_f64, 1.0));
        let p = InfConvParams::for_bound(0.05, 0.05, 0.02, 1.0);
        let uh = inf_convolution(&u, p).unwrap();
        let bound = 4.0 * 0.05 * 1.0 + p.displacement_slack(1.0);
        for k in 0..40 {
            let x = [-1.1 + 0.055 * k as f64, 0.3 - 0.01 * k as f64];
            let (v, y) = uh.argmin(&x).unwrap();
            assert!(v <= u.eval(&x));
            let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
            assert!(d2 <= bound);
        }
    }

    #[test]
    fn lipschitz_cone_is_semiconcave_after_regularization() {
        let h = 0.05;
        let step = 0.01;
        let cone = FnField::new(2, 1.0_f64, |x: &[f64]| -(x[0] * x[0] + x[1] * x[1]).sqrt());
        let p = InfConvParams { h, epsilon: 0.05, search_radius: 0.5, grid_step: step, refine_levels: 3 };
        let uh = inf_convolution(cone, p).unwrap();
        let r = semiconcavity_check(&uh, h, 300, 7, 0.5, 2.0 * step * step / h);
        assert_eq!(r.violations, 0, "{r:?}");
    }

    #[test]
    fn small_search_radius_is_rejected() {
        let u = RadialField::new(2, Bump::new(-1.0_f64, 1.0));
        let p = InfConvParams { h: 0.05, epsilon: 0.05, search_radius: 0.1, grid_step: 0.02, refine_levels: 1 };
        assert!(matches!(inf_convolution(&u, p), Err(Error::Resolution(_))));
    }
}
