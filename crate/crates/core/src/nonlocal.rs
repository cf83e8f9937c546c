//! Fractional Pucci operators and numerical checks of the identities that
//! tie the fractional Hessian to the Riesz potential.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fields::{radial_hessian, Mollified, PowerTail, RadialField, RadialProfile, ScalarField, SplineProfile};
use crate::matrixcore::{a_sigma_map, pucci_extremal_trace, Sign, SymMatrix};
use crate::quad::{
    fractional_hessian, radial_reduce_hessian, riesz_potential, riesz_potential_radial, Estimate, GaussRule,
    MatrixEstimate, QuadratureSpec,
};
use crate::real::{lit, on_axis, Real};
use crate::special::{compute_m0, sphere_area, KernelParams};

/// `D^sigma u(x)`, through the radial reduction when `u` is radial.
pub fn hessian_auto<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<MatrixEstimate<T>> {
    if u.radial().is_some() {
        radial_reduce_hessian(u, x, params, spec)
    } else {
        fractional_hessian(u, x, params, spec)
    }
}

/// Extremal trace of a fractional Hessian estimate.
///
/// Every admissible `A` has `Tr A = Tr A_sigma(A) <= n Lambda`, so a matrix
/// error `e` moves the extremal value by at most `n Lambda e`.
pub fn pucci_from_hessian<T: Real>(h: &MatrixEstimate<T>, params: &KernelParams<T>, sign: Sign) -> Result<Estimate<T>> {
    let ext = pucci_extremal_trace(&h.value, params, sign)?;
    let trace_bound = T::from_count(params.n) * params.big_lambda;
    let used: T = ext.coeffs.iter().map(|a| a.abs()).sum();
    Ok(Estimate { value: ext.value, err_bound: trace_bound.max(used) * h.err_bound })
}

/// `M^- u(x) = inf_{A in S} Tr(A D^sigma u(x))`.
pub fn pucci_minus<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    pucci_from_hessian(&hessian_auto(u, x, params, spec)?, params, Sign::Minus)
}

/// `M^+ u(x) = sup_{A in S} Tr(A D^sigma u(x))`.
pub fn pucci_plus<T: Real, F: ScalarField<T> + ?Sized>(
    u: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    pucci_from_hessian(&hessian_auto(u, x, params, spec)?, params, Sign::Plus)
}

/// How `D^2 P(x)` is obtained in [`hessian_consistency`].
#[derive(Clone, Copy)]
pub enum PotentialHessian<'a, T> {
    /// Richardson-extrapolated central differences of the Riesz potential
    /// quadrature with steps `h` and `h/2`; `potential_tol` is the accuracy
    /// requested from each potential evaluation.
    FiniteDifference { step: T, potential_tol: T },
    /// `P` is radial with the given profile, known in closed form.
    Radial(&'a dyn RadialProfile<T>),
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport<T> {
    /// `[D^2 P(x)]_sigma`.
    pub lhs: SymMatrix<T>,
    /// `D^sigma v(x)`.
    pub rhs: SymMatrix<T>,
    /// Largest entrywise difference.
    pub discrepancy: T,
    /// Frobenius norm of the difference over the Frobenius norm of `rhs`.
    pub relative: T,
    /// Entrywise bound for the `rhs` quadrature.
    pub rhs_bound: T,
    /// Entrywise estimate for the difference scheme, including the effect of
    /// the potential's own error bound.
    pub fd_bound: T,
}

impl<T: Real> ConsistencyReport<T> {
    pub fn combined_bound(&self) -> T {
        self.rhs_bound + self.fd_bound
    }

    pub fn within_bounds(&self) -> bool {
        self.discrepancy <= self.combined_bound()
    }
}

/// Compares `[D^2 P(x)]_sigma` with `D^sigma v(x)` where `P` is the Riesz
/// potential of `v`; the two agree exactly.
pub fn hessian_consistency<T: Real, F: ScalarField<T> + ?Sized>(
    v: &F,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
    potential: PotentialHessian<'_, T>,
) -> Result<ConsistencyReport<T>> {
    let rhs = fractional_hessian(v, x, params, spec)?;
    let (d2p, fd_bound) = match potential {
        PotentialHessian::Radial(p) => (radial_hessian(p, x)?, T::zero()),
        PotentialHessian::FiniteDifference { step, potential_tol } => {
            let pspec = spec.clone().with_tol(potential_tol);
            let coarse = fd_hessian(v, x, step, params, &pspec)?;
            let fine = fd_hessian(v, x, step / lit(2.0), params, &pspec)?;
            let noise = coarse.1.max(fine.1);
            let extrap = &(&fine.0.scale(lit(4.0)) - &coarse.0).scale(T::one() / lit(3.0));
            let truncation = (&fine.0 - &coarse.0).max_abs() / lit(3.0);
            (extrap.clone(), truncation + lit::<T>(23.0) * noise / (step * step))
        }
    };
    let lhs = a_sigma_map(&d2p, params)?;
    let diff = &lhs - &rhs.value;
    let scale = rhs.value.frobenius();
    let relative = if scale > T::zero() { diff.frobenius() / scale } else { diff.frobenius() };
    Ok(ConsistencyReport { discrepancy: diff.max_abs(), relative, rhs_bound: rhs.err_bound, fd_bound, lhs, rhs: rhs.value })
}

/// Central-difference Hessian of the Riesz potential of `v`, plus the
/// largest error bound of the potential values used.
fn fd_hessian<T: Real, F: ScalarField<T> + ?Sized>(
    v: &F,
    x: &[T],
    h: T,
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<(SymMatrix<T>, T)> {
    let n = x.len();
    let mut offsets: Vec<(usize, usize, i32, i32)> = vec![(0, 0, 0, 0)];
    for i in 0..n {
        offsets.push((i, i, 1, 0));
        offsets.push((i, i, -1, 0));
        for j in (i + 1)..n {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                offsets.push((i, j, si, sj));
            }
        }
    }
    let shifted = |&(i, j, si, sj): &(usize, usize, i32, i32)| {
        let mut z = x.to_vec();
        z[i] = z[i] + h * T::from_i32(si).expect("small integer");
        if i != j {
            z[j] = z[j] + h * T::from_i32(sj).expect("small integer");
        }
        z
    };
    let values: Vec<Result<Estimate<T>>> = offsets
        .par_iter()
        .map(|o| {
            let z = shifted(o);
            if v.radial().is_some() {
                riesz_potential_radial(v, &z, params, spec)
            } else {
                riesz_potential(v, &z, params, spec)
            }
        })
        .collect();
    let mut vals = Vec::with_capacity(values.len());
    let mut noise = T::zero();
    for e in values {
        let e = e?;
        noise = noise.max(e.err_bound);
        vals.push(e.value);
    }
    let lookup = |key: (usize, usize, i32, i32)| {
        let k = offsets.iter().position(|&o| o == key).expect("offset present");
        vals[k]
    };
    let p0 = vals[0];
    let m = SymMatrix::from_fn(n, |i, j| {
        if i == j {
            (lookup((i, i, 1, 0)) + lookup((i, i, -1, 0)) - p0 - p0) / (h * h)
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            (lookup((a, b, 1, 1)) - lookup((a, b, 1, -1)) - lookup((a, b, -1, 1)) + lookup((a, b, -1, -1)))
                / (lit::<T>(4.0) * h * h)
        }
    });
    Ok((m, noise))
}

/// `D^sigma (u_eps)(x) = sum_k w_k D^sigma u(x - z_k)` for a mollified field.
pub fn mollified_hessian<T: Real, F: ScalarField<T>>(
    u: &Mollified<F, T>,
    x: &[T],
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<MatrixEstimate<T>> {
    let terms: Vec<(Vec<T>, T)> = u.rule().map(|(z, w)| (x.iter().zip(z).map(|(&a, &b)| a - b).collect(), w)).collect();
    let parts: Vec<Result<(MatrixEstimate<T>, T)>> =
        terms.par_iter().map(|(p, w)| hessian_auto(u.inner(), p, params, spec).map(|h| (h, *w))).collect();
    let mut value = SymMatrix::zeros(x.len());
    let mut err = T::zero();
    for part in parts {
        let (h, w) = part?;
        value = &value + &h.value.scale(w);
        err = err + w.abs() * h.err_bound;
    }
    Ok(MatrixEstimate { value, err_bound: err })
}

/// Radical inverse of `k` in base `b`.
fn radical_inverse(mut k: usize, b: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= b as f64;
        r += f * (k % b) as f64;
        k /= b;
    }
    r
}

/// The first `count` points of a Halton sequence in `B_radius`, preceded by
/// the center.
pub fn halton_ball<T: Real>(n: usize, radius: T, count: usize) -> Vec<Vec<T>> {
    const BASES: [usize; 3] = [2, 3, 5];
    let mut out = vec![vec![T::zero(); n]];
    let mut k = 1;
    while out.len() < count + 1 {
        let p: Vec<f64> = (0..n).map(|d| 2.0 * radical_inverse(k, BASES[d]) - 1.0).collect();
        k += 1;
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(p.iter().map(|&v| radius * lit::<T>(v)).collect());
        }
    }
    out
}

/// Roughly uniform directions on the unit sphere: equispaced for `n = 2`, a
/// Fibonacci lattice for `n = 3`.
pub fn sphere_directions<T: Real>(n: usize, count: usize) -> Vec<Vec<T>> {
    let two_pi = T::PI() * lit(2.0);
    if n == 2 {
        return (0..count)
            .map(|k| {
                let a = two_pi * T::from_count(k) / T::from_count(count);
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let golden = (T::one() + lit::<T>(5.0).sqrt()) / lit(2.0);
    (0..count)
        .map(|k| {
            let z = T::one() - (lit::<T>(2.0) * T::from_count(k) + T::one()) / T::from_count(count);
            let rho = (T::one() - z * z).max(T::zero()).sqrt();
            let a = two_pi * T::from_count(k) / golden;
            vec![rho * a.cos(), rho * a.sin(), z]
        })
        .collect()
}

/// Sampling resolution for [`riesz_inf_ratio`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InfSampling {
    /// Halton points in `B_{M0 r}` besides the center.
    pub inside: usize,
    /// Directions per sphere of the outside shell.
    pub directions: usize,
    /// Multiples of `M0 r` at which the outside spheres are placed.
    pub shells: [f64; 5],
}

impl Default for InfSampling {
    fn default() -> Self {
        InfSampling { inside: 64, directions: 48, shells: [1.0, 1.1, 1.3, 1.7, 2.5] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfRatioReport {
    pub m0: f64,
    pub inside_points: usize,
    pub outside_points: usize,
    /// Sampled `inf_{B_{M0 r}} P`.
    pub inf_inside: f64,
    /// Sampled `inf` of `P` outside `B_{M0 r}`.
    pub inf_outside: f64,
    /// `-inf_outside`.
    pub lhs: f64,
    /// `-(1/2) inf_inside`.
    pub rhs: f64,
    /// Quadrature error of both sides plus a Lipschitz bound times the fill
    /// distance of the outside sample.
    pub slack: f64,
    pub holds: bool,
}

/// Samples both sides of `-inf_{outside} P <= -(1/2) inf_{B_{M0 r}} P` for
/// the Riesz potential `P` of a non-positive `v` supported in `B_r`.
pub fn riesz_inf_ratio<F: ScalarField<f64> + ?Sized>(
    v: &F,
    r: f64,
    params: &KernelParams<f64>,
    spec: &QuadratureSpec<f64>,
    sampling: &InfSampling,
) -> Result<InfRatioReport> {
    let n = params.n;
    match v.support_radius() {
        Some(s) if s <= r * (1.0 + 1e-12) => {}
        _ => return domain("the density must be supported in B_r"),
    }
    let m0 = compute_m0(n, params.sigma)?;
    let big_r = m0 * r;
    let inside = halton_ball::<f64>(n, big_r, sampling.inside);
    for z in &inside {
        if v.eval(&z.iter().map(|c| c * r / big_r).collect::<Vec<_>>()) > 0.0 {
            return domain("the density must be non-positive");
        }
    }
    let dirs = sphere_directions::<f64>(n, sampling.directions);
    let outside: Vec<Vec<f64>> = sampling
        .shells
        .iter()
        .flat_map(|&k| dirs.iter().map(move |d| d.iter().map(|c| c * k * big_r).collect()))
        .collect();
    let eval = |z: &Vec<f64>| {
        if v.radial().is_some() {
            riesz_potential_radial(v, z, params, spec)
        } else {
            riesz_potential(v, z, params, spec)
        }
    };
    let inside_vals: Vec<Result<Estimate<f64>>> = inside.par_iter().map(eval).collect();
    let outside_vals: Vec<Result<Estimate<f64>>> = outside.par_iter().map(eval).collect();
    let fold = |vals: Vec<Result<Estimate<f64>>>| -> Result<(f64, f64)> {
        let mut inf = f64::INFINITY;
        let mut err = 0.0f64;
        for e in vals {
            let e = e?;
            inf = inf.min(e.value);
            err = err.max(e.err_bound);
        }
        Ok((inf, err))
    };
    let (inf_in, err_in) = fold(inside_vals)?;
    let (inf_out, err_out) = fold(outside_vals)?;
    let slack = err_out + 0.5 * err_in + riesz_lipschitz(v, r, big_r, params)? * fill_distance(n, big_r, sampling);
    let lhs = -inf_out;
    let rhs = -0.5 * inf_in;
    Ok(InfRatioReport {
        m0,
        inside_points: inside.len(),
        outside_points: outside.len(),
        inf_inside: inf_in,
        inf_outside: inf_out,
        lhs,
        rhs,
        slack,
        holds: lhs <= rhs + slack,
    })
}

/// Lipschitz constant of `P` outside `B_{big_r}` for `v` supported in `B_r`.
fn riesz_lipschitz<F: ScalarField<f64> + ?Sized>(v: &F, r: f64, big_r: f64, params: &KernelParams<f64>) -> Result<f64> {
    let n = params.n;
    let a = crate::special::norm_const_pos(n, params.sigma)?;
    let mass = v.sup_bound() * sphere_area::<f64>(n) * r.powi(n as i32) / n as f64;
    let gap = big_r - r;
    Ok(a * (n as f64 - 2.0 + params.sigma) * mass * gap.powf(-(n as f64) + 1.0 - params.sigma))
}

/// Distance from any point of the sampled shell region to the nearest
/// sample, for the sphere closest to `B_{M0 r}`.
fn fill_distance(n: usize, big_r: f64, sampling: &InfSampling) -> f64 {
    let m = sampling.directions as f64;
    let angular = if n == 2 { std::f64::consts::PI / m } else { (4.0 * std::f64::consts::PI / m).sqrt() };
    big_r * angular
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbpReport {
    pub p: f64,
    /// `-inf_{B_1} u` over the sample.
    pub lhs: f64,
    /// `||f^+||_{L^p(B_1)}`.
    pub f_norm: f64,
    /// `sigma M0^{2-n/p} / (sigma - n/p)`.
    pub factor: f64,
    /// `lhs / (factor ||f^+||_p)`.
    pub ratio: f64,
    /// Smallest sampled value of `u` on `1 <= |x| <= 3`.
    pub outside_min: f64,
    pub sample_points: usize,
}

/// Resolution of [`abp_ratio`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AbpSampling {
    pub inside: usize,
    pub directions: usize,
    pub outside_radii: usize,
}

impl Default for AbpSampling {
    fn default() -> Self {
        AbpSampling { inside: 128, directions: 24, outside_radii: 8 }
    }
}

/// Data for the ABP estimate `-inf_{B_1} u <= C sigma M0^{2-n/p}/(sigma-n/p) ||f^+||_p`
/// with the unknown constant `C` left out.
pub fn abp_ratio<U: ScalarField<f64> + ?Sized, G: ScalarField<f64> + ?Sized>(
    u: &U,
    f_plus: &G,
    p: f64,
    params: &KernelParams<f64>,
    spec: &QuadratureSpec<f64>,
    sampling: &AbpSampling,
) -> Result<AbpReport> {
    let n = params.n;
    let np = n as f64 / p;
    if !(params.sigma > np) {
        return domain(format!("the ABP factor needs p > n/sigma = {}, got p = {p}", n as f64 / params.sigma));
    }
    spec.validate(n)?;
    let inside = halton_ball::<f64>(n, 1.0, sampling.inside);
    let lhs = -inside.par_iter().map(|z| u.eval(z)).reduce(|| f64::INFINITY, f64::min);
    let dirs = sphere_directions::<f64>(n, sampling.directions);
    let radii: Vec<f64> = (0..sampling.outside_radii)
        .map(|k| 1.0 + 2.0 * k as f64 / (sampling.outside_radii.max(2) - 1) as f64)
        .collect();
    let outside: Vec<Vec<f64>> =
        radii.iter().flat_map(|&t| dirs.iter().map(move |d| d.iter().map(|c| c * t).collect())).collect();
    let outside_min = outside.par_iter().map(|z| u.eval(z)).reduce(|| f64::INFINITY, f64::min);
    let f_norm = lp_norm_ball(f_plus, p, spec);
    let m0 = compute_m0(n, params.sigma)?;
    let factor = params.sigma * m0.powf(2.0 - np) / (params.sigma - np);
    Ok(AbpReport {
        p,
        lhs,
        f_norm,
        factor,
        ratio: lhs / (factor * f_norm),
        outside_min,
        sample_points: inside.len() + outside.len(),
    })
}

/// `||f^+||_{L^p(B_1)}` in polar coordinates with panels split at the
/// field's kink radii.
pub fn lp_norm_ball<G: ScalarField<f64> + ?Sized>(f: &G, p: f64, spec: &QuadratureSpec<f64>) -> f64 {
    let n = f.dim();
    let g = GaussRule::<f64>::new(spec.gauss_order.max(8));
    let mut edges = vec![0.0];
    let mut kinks: Vec<f64> = f.kink_radii().into_iter().filter(|&k| k > 0.0 && k < 1.0).collect();
    kinks.sort_by(|a, b| a.total_cmp(b));
    edges.extend(kinks);
    edges.push(1.0);
    let integrand = |t: f64, d: &[f64]| {
        let z: Vec<f64> = d.iter().map(|c| c * t).collect();
        let v = f.eval(&z).max(0.0);
        if v > 0.0 {
            (p * v.ln()).exp() * t.powi(n as i32 - 1)
        } else {
            0.0
        }
    };
    let radial_integral = |d: &[f64]| -> f64 {
        edges
            .windows(2)
            .map(|w| {
                if w[0] == 0.0 {
                    g.integrate_uniform(w[0], w[1], 8, |t| integrand(t, d))
                } else {
                    g.integrate_graded(w[0], w[1], spec.radial_levels.max(4), |t| integrand(t, d))
                }
            })
            .sum()
    };
    let total: f64 = if f.radial().is_some() {
        let d = crate::real::on_axis(n, 1.0);
        radial_integral(&d) * sphere_area::<f64>(n)
    } else {
        let dirs = sphere_directions::<f64>(n, spec.angular_points);
        let w = sphere_area::<f64>(n) / dirs.len() as f64;
        dirs.par_iter().map(|d| radial_integral(d)).collect::<Vec<_>>().iter().sum::<f64>() * w
    };
    total.powf(1.0 / p)
}

/// Knots on `[0, r_max]`, quadratically graded away from the origin and
/// clustered geometrically on both sides of each kink.
pub fn graded_knots<T: Real>(r_max: T, count: usize, kinks: &[T], closest: T, ratio: T, reach: T) -> Vec<T> {
    let mut k: Vec<T> = (0..=count)
        .map(|i| {
            let s = T::from_count(i) / T::from_count(count);
            r_max * s * s
        })
        .collect();
    for &b in kinks {
        let mut d = closest;
        while d < reach {
            for z in [b - d, b + d] {
                if z > T::zero() && z < r_max {
                    k.push(z);
                }
            }
            d = d * ratio;
        }
        if b > T::zero() && b < r_max {
            k.push(b);
        }
    }
    k.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
    k.dedup_by(|a, b| (*a - *b).abs() <= lit::<T>(1e-13) * b.abs().max(T::one()));
    k
}

/// The Riesz potential of a compactly supported radial density, tabulated
/// by a cubic spline with the power tail `|x|^{-(n-2+sigma)}`. Returns the
/// field and the largest certified error of the sampled values.
pub fn tabulate_riesz_radial<T: Real, F: ScalarField<T> + ?Sized>(
    v: &F,
    knots: Vec<T>,
    params: &KernelParams<T>,
    spec: &QuadratureSpec<T>,
) -> Result<(RadialField<SplineProfile<T>>, T)> {
    let n = params.n;
    let samples: Vec<Result<Estimate<T>>> =
        knots.par_iter().map(|&r| riesz_potential_radial(v, &on_axis(n, r), params, spec)).collect();
    let mut values = Vec::with_capacity(knots.len());
    let mut worst = T::zero();
    for s in samples {
        let e = s?;
        worst = worst.max(e.err_bound);
        values.push(e.value);
    }
    let tail = PowerTail { exponent: T::from_count(n) - lit(2.0) + params.sigma };
    let spline = SplineProfile::new(knots, values, tail)?.with_kinks(v.kink_radii());
    Ok((RadialField::new(n, spline), worst))
}
