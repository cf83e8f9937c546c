//! The explicit radial family `u_N = (-Delta)^{(2-sigma)/2} P_N`,
//! `P_N(x) = phi_N(|x|)`, along which the ABP bound at the exponent
//! `p0 = n tau` and the `W^{sigma,p0}` bound both degenerate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fields::{radial_hessian, radial_third_bound, PowerTail, RadialField, RadialProfile, SplineProfile};
use crate::nonlocal::graded_knots;
use crate::matrixcore::{a_sigma_map, pucci_extremal_trace, Sign, SymMatrix};
use crate::quad::{fractional_laplacian_dual, radial_reduce_dual, Estimate, GaussRule, QuadratureSpec};
use crate::real::{lit, on_axis, Real};
use crate::special::{norm_const_neg, sphere_area, KernelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams<T> {
    pub n: usize,
    pub sigma: T,
    pub lambda: T,
    #[serde(rename = "Lambda")]
    pub big_lambda: T,
    #[serde(rename = "N")]
    pub big_n: u64,
}

impl<T: Real> CounterexampleParams<T> {
    pub fn new(n: usize, sigma: T, lambda: T, big_lambda: T, big_n: u64) -> Result<Self> {
        let p = CounterexampleParams { n, sigma, lambda, big_lambda, big_n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 3 {
            return domain(format!("the construction needs n = 2 or 3, got n = {}", self.n));
        }
        let nf = T::from_count(self.n);
        if !(self.sigma * self.sigma > nf && self.sigma < lit(2.0)) {
            return domain(format!(
                "sigma = {} is outside the construction's range (sqrt(n), 2) = ({:.6}, 2)",
                self.sigma,
                nf.sqrt()
            ));
        }
        if self.big_n < 2 {
            return domain("N must be at least 2");
        }
        if !(self.lambda > T::zero()) {
            return domain("lambda must be positive");
        }
        if self.big_lambda < (T::one() + self.sigma) * self.lambda {
            return domain(format!(
                "Lambda = {} must be at least (1 + sigma) lambda = {}",
                self.big_lambda,
                (T::one() + self.sigma) * self.lambda
            ));
        }
        let tau = self.tau();
        if !(lit::<T>(2.0) * tau - T::one() > T::zero()) {
            return domain("2 tau - 1 must be positive");
        }
        if !(self.n_real() * (T::one() - tau) > T::one()) {
            return domain(format!("N (1 - tau) must exceed 1, got N = {}", self.big_n));
        }
        Ok(())
    }

    /// `(sigma + 1) / (sigma + n)`.
    pub fn tau(&self) -> T {
        (self.sigma + T::one()) / (self.sigma + T::from_count(self.n))
    }

    /// `n tau`.
    pub fn p0(&self) -> T {
        T::from_count(self.n) * self.tau()
    }

    pub fn n_real(&self) -> T {
        T::from_count(self.big_n as usize)
    }

    pub fn kernel(&self) -> KernelParams<T> {
        KernelParams { n: self.n, sigma: self.sigma, lambda: self.lambda, big_lambda: self.big_lambda, eta: T::zero() }
    }

    /// `log((1 - tau) N)`.
    pub fn log_scale(&self) -> T {
        ((T::one() - self.tau()) * self.n_real()).ln()
    }
}

/// The profile `phi_N`: zero outside `B_1`, a parabola on `[1-tau, 1)`, a
/// logarithmic branch on `[1/N, 1-tau)` and constant on `[0, 1/N)`.
#[derive(Debug, Clone, Copy)]
pub struct PhiN<T> {
    tau: T,
    big_n: T,
    /// `log((1-tau) N)`.
    l: T,
    /// `(1-tau)^{(1-tau)/tau}`.
    k: T,
    r1: T,
    r2: T,
    mid_shift: T,
    inner: T,
}

impl<T: Real> PhiN<T> {
    pub fn new(params: &CounterexampleParams<T>) -> Result<Self> {
        params.validate()?;
        let tau = params.tau();
        let big_n = params.n_real();
        let r2 = T::one() - tau;
        let mut phi = PhiN {
            tau,
            big_n,
            l: params.log_scale(),
            k: r2.powf(r2 / tau),
            r1: T::one() / big_n,
            r2,
            mid_shift: T::zero(),
            inner: T::zero(),
        };
        phi.mid_shift = -phi.l / (lit::<T>(2.0) * phi.k) - phi.mid_antiderivative(r2);
        phi.inner = phi.mid_shift + phi.mid_antiderivative(phi.r1);
        Ok(phi)
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Antiderivative of `log(rN) / (tau r^{(1-tau)/tau})`.
    fn mid_antiderivative(&self, r: T) -> T {
        let d = lit::<T>(2.0) * self.tau - T::one();
        let ra = r.powf(d / self.tau);
        (ra * (r * self.big_n).ln() - self.tau * ra / d) / d
    }

    /// The constant added to [`Self::unshifted_middle`] so that the
    /// profile is continuous at `1 - tau`; equals `log((1-tau)N) / (2 K)`.
    pub fn continuity_shift(&self) -> T {
        self.l / (lit::<T>(2.0) * self.k)
    }

    /// The closed form of the logarithmic branch without the continuity
    /// shift.
    pub fn unshifted_middle(&self, r: T) -> T {
        let tau = self.tau;
        let d = lit::<T>(2.0) * tau - T::one();
        let a = d / tau;
        let r2a = self.r2.powf(a);
        let ra = r.powf(a);
        -(tau * self.l / self.k - ra * (r * self.big_n).ln() - tau / d * (r2a - ra)) / d
    }

    /// `psi(r)` for this `tau`.
    pub fn psi(&self, r: T) -> T {
        psi(r, self.tau)
    }

    /// `tau phi'' + (1 - tau) phi' / r`.
    pub fn radial_combination(&self, r: T) -> T {
        self.tau * self.ddphi(r) + (T::one() - self.tau) * self.dphi(r) / r
    }

    fn third(&self, r: T) -> T {
        let tau = self.tau;
        let k = (T::one() - tau) / tau;
        let g = ((r * self.big_n).ln() * k - T::one()) / tau - k;
        r.powf(-T::one() / tau - T::one()) * g / tau
    }

    fn mid_second_abs_max(&self, lo: T, hi: T) -> T {
        let k = (T::one() - self.tau) / self.tau;
        let g = |r: T| (k * (r * self.big_n).ln() - T::one()).abs();
        lo.powf(-T::one() / self.tau) * g(lo).max(g(hi)) / self.tau
    }
}

impl<T: Real> RadialProfile<T> for PhiN<T> {
    fn phi(&self, r: T) -> T {
        if r >= T::one() {
            T::zero()
        } else if r >= self.r2 {
            let s = T::one() - r;
            -s * s * self.l / (lit::<T>(2.0) * self.tau * self.tau * self.k)
        } else if r >= self.r1 {
            self.mid_shift + self.mid_antiderivative(r)
        } else {
            self.inner
        }
    }

    fn dphi(&self, r: T) -> T {
        if r >= T::one() || r < self.r1 {
            T::zero()
        } else if r >= self.r2 {
            (T::one() - r) * self.l / (self.tau * self.tau * self.k)
        } else {
            (r * self.big_n).ln() / (self.tau * r.powf((T::one() - self.tau) / self.tau))
        }
    }

    fn ddphi(&self, r: T) -> T {
        if r >= T::one() || r < self.r1 {
            T::zero()
        } else if r >= self.r2 {
            -self.l / (self.tau * self.tau * self.k)
        } else {
            let k = (T::one() - self.tau) / self.tau;
            -(k * (r * self.big_n).ln() - T::one()) / (self.tau * r.powf(T::one() / self.tau))
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.r1, self.r2, T::one()]
    }

    fn support(&self) -> Option<T> {
        Some(T::one())
    }

    fn sup_abs(&self) -> T {
        self.inner.abs()
    }

    fn c11(&self) -> Option<T> {
        let tau = self.tau;
        let outer = self.l / (tau * tau * self.k);
        let k = (T::one() - tau) / tau;
        let mid2 = self.big_n.powf(T::one() / tau) * T::one().max(k * self.l - T::one()) / tau;
        let mid1 = self.big_n.powf(T::one() / tau) / T::E();
        let outer1 = outer * tau / self.r2;
        Some(outer.max(mid2).max(mid1).max(outer1))
    }

    fn monotone(&self) -> bool {
        true
    }

    fn d3_bound(&self, lo: T, hi: T) -> Option<T> {
        let tau = self.tau;
        if hi < self.r1 || lo > T::one() {
            return Some(T::zero());
        }
        if lo > self.r2 && hi < T::one() {
            let f2 = self.l / (tau * tau * self.k);
            let f1 = (T::one() - lo) * f2;
            return Some(radial_third_bound(lo, f1, f2, T::zero(), false));
        }
        if lo > self.r1 && hi < self.r2 {
            let f3 = self.third(lo).abs().max(self.third(hi).abs() * (hi / lo).powf(T::one() / tau + T::one()));
            let f2 = self.mid_second_abs_max(lo, hi);
            let f1 = (hi * self.big_n).ln() / (tau * lo.powf((T::one() - tau) / tau));
            return Some(radial_third_bound(lo, f1, f2, f3, false));
        }
        None
    }
}

/// `min{(1-r)/(tau^2 (1-tau)^{(1-tau)/tau}), 1/(tau r^{(1-tau)/tau})}` on
/// `(0, 1]`, zero for `r > 1`.
pub fn psi<T: Real>(r: T, tau: T) -> T {
    if r > T::one() || r <= T::zero() {
        return T::zero();
    }
    let k = (T::one() - tau).powf((T::one() - tau) / tau);
    let first = (T::one() - r) / (tau * tau * k);
    let second = T::one() / (tau * r.powf((T::one() - tau) / tau));
    first.min(second)
}

pub fn phi_profile<T: Real>(params: &CounterexampleParams<T>) -> Result<PhiN<T>> {
    PhiN::new(params)
}

/// `P_N` as a field on `R^n`.
pub fn p_n_field<T: Real>(params: &CounterexampleParams<T>) -> Result<RadialField<PhiN<T>>> {
    Ok(RadialField::new(params.n, PhiN::new(params)?))
}

/// `u_N(x) = A(n,-(2-sigma)) int (P_N(x) - P_N(x+y)) / |y|^{n+2-sigma} dy`
/// through the general dual quadrature.
pub fn u_n_eval<T: Real>(x: &[T], params: &CounterexampleParams<T>, spec: &QuadratureSpec<T>) -> Result<Estimate<T>> {
    let p = p_n_field(params)?;
    fractional_laplacian_dual(&p, x, &params.kernel(), spec)
}

/// `u_N(r e_1)` through the radial reduction of the dual quadrature.
pub fn u_n_radial<T: Real>(r: T, params: &CounterexampleParams<T>, spec: &QuadratureSpec<T>) -> Result<Estimate<T>> {
    let p = p_n_field(params)?;
    radial_reduce_dual(&p, &on_axis(params.n, r), &params.kernel(), spec)
}

/// `[D^2 P_N(r e_1)]_sigma`, which equals `D^sigma u_N(r e_1)`.
pub fn sigma_hessian_p_n<T: Real>(phi: &PhiN<T>, r: T, params: &CounterexampleParams<T>) -> Result<SymMatrix<T>> {
    let h = radial_hessian(phi, &on_axis(params.n, r))?;
    a_sigma_map(&h, &params.kernel())
}

/// `M^- u_N` at radius `r`, exact: the fractional Hessian of `u_N` is the
/// `A_sigma` image of `D^2 P_N`, and the extremal trace is a linear program.
pub fn mminus_u_n<T: Real>(r: T, params: &CounterexampleParams<T>) -> Result<T> {
    let phi = PhiN::new(params)?;
    mminus_with(&phi, r, params)
}

fn mminus_with<T: Real>(phi: &PhiN<T>, r: T, params: &CounterexampleParams<T>) -> Result<T> {
    if !(r > T::zero()) {
        return domain("M^- u_N is evaluated at r > 0");
    }
    let h = radial_hessian(phi, &on_axis(params.n, r))?;
    let d = a_sigma_map(&h, &params.kernel())?;
    Ok(pucci_extremal_trace(&d, &params.kernel(), Sign::Minus)?.value)
}

/// Lower-bound constant `c` with `-u_N(0) >= c log(N/4)`:
/// `(A(n,-(2-sigma))/2) |S^{n-1}| int_{1/2}^1 psi(r) r^{sigma-2} dr`.
pub fn lower_bound_constant<T: Real>(params: &CounterexampleParams<T>) -> Result<T> {
    let tau = params.tau();
    let a = norm_const_neg(params.n, params.kernel().dual_order())?;
    let area = sphere_area::<T>(params.n);
    let k = (T::one() - tau).powf((T::one() - tau) / tau);
    // The two branches of psi cross where (1-r) r^{(1-tau)/tau} = tau K.
    let cross = bisect(lit(0.5), T::one(), |r| (T::one() - r) * r.powf((T::one() - tau) / tau) - tau * k);
    let g = GaussRule::<T>::new(20);
    let f = |r: T| psi(r, tau) * r.powf(params.sigma - lit(2.0));
    let mut edges = vec![lit::<T>(0.5)];
    if let Some(c) = cross {
        edges.push(c);
    }
    edges.push(T::one());
    let integral: T = edges.windows(2).map(|w| g.integrate_uniform(w[0], w[1], 8, f)).sum();
    Ok(a / lit(2.0) * area * integral)
}

fn bisect<T: Real>(mut lo: T, mut hi: T, f: impl Fn(T) -> T) -> Option<T> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) / lit(2.0))
}

/// `(|S^{n-1}| int_lo^hi f(r)^{p} r^{n-1} dr)^{1/p}` for nonnegative `f`,
/// with panel edges at `splits`.
fn radial_lp_norm<T: Real>(n: usize, p: T, lo: T, hi: T, splits: &[T], f: impl Fn(T) -> T) -> T {
    let g = GaussRule::<T>::new(16);
    let mut edges = vec![lo];
    edges.extend(splits.iter().copied().filter(|&s| s > lo && s < hi));
    edges.push(hi);
    let integrand = |r: T| {
        let v = f(r);
        if v > T::zero() {
            (p * v.ln()).exp() * r.powi(n as i32 - 1)
        } else {
            T::zero()
        }
    };
    let integral: T = edges.windows(2).map(|w| g.integrate_graded(w[0], w[1], 12, integrand)).sum();
    (sphere_area::<T>(n) * integral).powf(T::one() / p)
}

/// `||(M^- u_N)^+||_{L^{p0}(B_1)}`.
pub fn mminus_positive_norm<T: Real>(params: &CounterexampleParams<T>) -> Result<T> {
    let phi = PhiN::new(params)?;
    let f = |r: T| mminus_with(&phi, r, params).map(|v| v.max(T::zero())).unwrap_or(T::nan());
    Ok(radial_lp_norm(params.n, params.p0(), phi.r1, phi.r2, &[], f))
}

/// `||M^- u_N||_{L^{p0}(B_1)}`.
pub fn mminus_norm<T: Real>(params: &CounterexampleParams<T>) -> Result<T> {
    let phi = PhiN::new(params)?;
    let f = |r: T| mminus_with(&phi, r, params).map(|v| v.abs()).unwrap_or(T::nan());
    Ok(radial_lp_norm(params.n, params.p0(), phi.r1, T::one(), &[phi.r2], f))
}

/// `lambda (n + sigma) (|S^{n-1}| log((1-tau)N))^{1/p0}`.
pub fn mminus_norm_upper_bound<T: Real>(params: &CounterexampleParams<T>) -> T {
    let nps = T::from_count(params.n) + params.sigma;
    params.lambda * nps * (sphere_area::<T>(params.n) * params.log_scale()).powf(T::one() / params.p0())
}

/// `||D^sigma u_N||_{L^{p0}(B_{1/2})} = ||[D^2 P_N]_sigma||_{L^{p0}(B_{1/2})}`
/// with the Frobenius norm on matrices.
pub fn sigma_hessian_norm<T: Real>(params: &CounterexampleParams<T>) -> Result<T> {
    let phi = PhiN::new(params)?;
    let f = |r: T| sigma_hessian_p_n(&phi, r, params).map(|m| m.frobenius()).unwrap_or(T::nan());
    Ok(radial_lp_norm(params.n, params.p0(), phi.r1, lit(0.5), &[phi.r2], f))
}

/// `int_{B_{1/2}} |phi_N''(|x|)|^{p0} dx` by radial quadrature.
pub fn second_derivative_power_integral<T: Real>(params: &CounterexampleParams<T>) -> Result<T> {
    let phi = PhiN::new(params)?;
    let p0 = params.p0();
    Ok(radial_lp_norm(params.n, p0, phi.r1, lit(0.5), &[phi.r2], |r| phi.ddphi(r).abs()).powf(p0))
}

/// Knots for tabulating `u_N`, clustered around the breakpoints of
/// `phi_N`.
pub fn u_n_knots<T: Real>(phi: &PhiN<T>, r_max: T, count: usize, closest: T, ratio: T) -> Vec<T> {
    graded_knots(r_max, count, &phi.breakpoints(), closest, ratio, lit(0.05))
}

/// `u_N` tabulated by a cubic spline on [`u_n_knots`] with a power tail of
/// exponent `n + 2 - sigma`. Also returns the largest certified error of the
/// sampled values; the interpolation error is not part of it.
pub fn tabulate_u_n<T: Real>(
    params: &CounterexampleParams<T>,
    knots: Vec<T>,
    spec: &QuadratureSpec<T>,
) -> Result<(RadialField<SplineProfile<T>>, T)> {
    let p = p_n_field(params)?;
    let kp = params.kernel();
    let samples: Vec<Result<Estimate<T>>> =
        knots.par_iter().map(|&r| radial_reduce_dual(&p, &on_axis(params.n, r), &kp, spec)).collect();
    let mut values = Vec::with_capacity(knots.len());
    let mut worst = T::zero();
    for s in samples {
        let e = s?;
        worst = worst.max(e.err_bound);
        values.push(e.value);
    }
    let tail = PowerTail { exponent: T::from_count(params.n) + kp.dual_order() };
    let spline = SplineProfile::new(knots, values, tail)?.with_kinks(p.profile().breakpoints());
    Ok((RadialField::new(params.n, spline), worst))
}

/// One row of the growth report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CeRow {
    #[serde(rename = "N")]
    pub big_n: u64,
    /// `-u_N(0)`.
    pub a: f64,
    pub a_err: f64,
    /// `c log(N/4)`.
    pub a_bound: f64,
    /// `||(M^- u_N)^+||_{p0}`.
    pub b: f64,
    pub b_bound: f64,
    /// `A / B`.
    pub c: f64,
    /// `||u_N||_inf` over the sampled radii.
    pub d: f64,
    /// `||D^sigma u_N||_{L^{p0}(B_{1/2})}`.
    pub e: f64,
    /// `E / (B' + D)` with `B' = ||M^- u_N||_{p0}`.
    pub f: f64,
    pub b_full: f64,
    /// Smallest sampled value of `u_N` outside `B_1` plus its error bound.
    pub outside_min: f64,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CeReport {
    pub n: usize,
    pub sigma: f64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub tau: f64,
    pub p0: f64,
    pub lower_bound_constant: f64,
    pub rows: Vec<CeRow>,
    /// Least-squares slope of `ln C` against `ln ln N`.
    pub c_exponent: f64,
    pub c_exponent_target: f64,
    pub f_exponent: f64,
    pub f_exponent_target: f64,
}

impl CeReport {
    pub fn c_increasing(&self) -> bool {
        strictly_increasing(self.rows.iter().map(|r| r.c))
    }

    pub fn f_increasing(&self) -> bool {
        strictly_increasing(self.rows.iter().map(|r| r.f))
    }

    pub fn lower_bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.a + r.a_err >= r.a_bound)
    }

    pub fn upper_bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.b <= r.b_bound * (1.0 + 1e-6))
    }

    pub fn flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flag.is_some())
    }
}

fn strictly_increasing(it: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = it.collect();
    !v.is_empty() && v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] > w[0])
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Radii at which `||u_N||_inf` and the sign of `u_N` outside `B_1` are
/// sampled.
pub const SUP_SAMPLES: usize = 48;

fn report_row(params: &CounterexampleParams<f64>, c: f64, spec: &QuadratureSpec<f64>) -> CeRow {
    let mut row = CeRow {
        big_n: params.big_n,
        a: f64::NAN,
        a_err: f64::NAN,
        a_bound: c * (params.n_real() / 4.0).ln(),
        b: f64::NAN,
        b_bound: mminus_norm_upper_bound(params),
        c: f64::NAN,
        d: f64::NAN,
        e: f64::NAN,
        f: f64::NAN,
        b_full: f64::NAN,
        outside_min: f64::NAN,
        flag: None,
    };
    let result = (|| -> Result<()> {
        let a = u_n_radial(0.0, params, spec)?;
        row.a = -a.value;
        row.a_err = a.err_bound;
        row.b = mminus_positive_norm(params)?;
        row.c = row.a / row.b;
        let radii: Vec<f64> = (1..=SUP_SAMPLES).map(|i| 3.0 * i as f64 / SUP_SAMPLES as f64).collect();
        let vals: Vec<Result<Estimate<f64>>> = radii.iter().map(|&r| u_n_radial(r, params, spec)).collect();
        let mut d = a.value.abs();
        let mut outside = f64::INFINITY;
        for (r, v) in radii.iter().zip(vals) {
            let v = v?;
            d = d.max(v.value.abs());
            if *r > 1.0 {
                outside = outside.min(v.value + v.err_bound);
            }
        }
        row.d = d;
        row.outside_min = outside;
        row.e = sigma_hessian_norm(params)?;
        row.b_full = mminus_norm(params)?;
        row.f = row.e / (row.b_full + row.d);
        Ok(())
    })();
    if let Err(e) = result {
        row.flag = Some(e.to_string());
    }
    row
}

/// Computes one row per entry of `ladder`; all entries must share
/// `(n, sigma, lambda, Lambda)`.
pub fn run_report(ladder: &[CounterexampleParams<f64>], spec: &QuadratureSpec<f64>) -> Result<CeReport> {
    let Some(first) = ladder.first() else {
        return domain("the N ladder is empty");
    };
    for p in ladder {
        p.validate()?;
        if p.n != first.n || p.sigma != first.sigma || p.lambda != first.lambda || p.big_lambda != first.big_lambda {
            return domain("all ladder entries must share n, sigma, lambda and Lambda");
        }
    }
    if ladder.windows(2).any(|w| w[1].big_n <= w[0].big_n) {
        return domain("the N ladder must be strictly increasing");
    }
    spec.validate(first.n)?;
    let c = lower_bound_constant(first)?;
    let rows: Vec<CeRow> = ladder.par_iter().map(|p| report_row(p, c, spec)).collect();
    let lnln: Vec<f64> = rows.iter().map(|r| (r.big_n as f64).ln().ln()).collect();
    let fit = |ys: Vec<f64>| {
        if rows.len() >= 2 && ys.iter().all(|y| y.is_finite()) {
            fit_slope(&lnln, &ys)
        } else {
            f64::NAN
        }
    };
    let c_exponent = fit(rows.iter().map(|r| r.c.ln()).collect());
    let f_exponent = fit(rows.iter().map(|r| r.f.ln()).collect());
    let p0 = first.p0();
    Ok(CeReport {
        n: first.n,
        sigma: first.sigma,
        lambda: first.lambda,
        big_lambda: first.big_lambda,
        tau: first.tau(),
        p0,
        lower_bound_constant: c,
        rows,
        c_exponent,
        c_exponent_target: 1.0 - 1.0 / p0,
        f_exponent,
        f_exponent_target: 1.0 / p0,
    })
}

/// Builds the ladder `N in ns` for shared parameters.
pub fn ladder(n: usize, sigma: f64, lambda: f64, big_lambda: f64, ns: &[u64]) -> Result<Vec<CounterexampleParams<f64>>> {
    ns.iter().map(|&big_n| CounterexampleParams::new(n, sigma, lambda, big_lambda, big_n)).collect()
}
