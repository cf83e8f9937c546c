use super::profile::{radial_third_bound, RadialProfile};
use crate::error::{domain, Result};
use crate::real::{lit, Real};

/// Continuation `coef * r^(-exponent)` beyond the last knot; `exponent = 0`
/// continues with a constant.
#[derive(Debug, Clone, Copy)]
pub struct PowerTail<T> {
    pub exponent: T,
}

/// Cubic spline profile on `[0, r_m]` with `phi'(0) = 0`, joined in `C^1`
/// fashion to a power tail.
///
/// Used to tabulate radial fields whose pointwise evaluation is itself a
/// quadrature.
#[derive(Debug, Clone)]
pub struct SplineProfile<T> {
    knots: Vec<T>,
    values: Vec<T>,
    moments: Vec<T>,
    tail_coef: T,
    tail_exp: T,
    kinks: Vec<T>,
    monotone: bool,
}

impl<T: Real> SplineProfile<T> {
    /// `knots` must start at 0 and increase strictly.
    pub fn new(knots: Vec<T>, values: Vec<T>, tail: PowerTail<T>) -> Result<Self> {
        let m = knots.len();
        if m < 3 || values.len() != m {
            return domain("spline needs at least three knots and matching values");
        }
        if knots[0] != T::zero() || knots.windows(2).any(|w| w[1] <= w[0]) {
            return domain("spline knots must start at 0 and increase strictly");
        }
        if tail.exponent < T::zero() {
            return domain("tail exponent must be nonnegative");
        }
        let rm = knots[m - 1];
        let ym = values[m - 1];
        let tail_coef = ym * rm.powf(tail.exponent);
        let end_slope = -tail.exponent * ym / rm;
        let moments = clamped_moments(&knots, &values, T::zero(), end_slope);
        let mut sp = SplineProfile {
            knots,
            values,
            moments,
            tail_coef,
            tail_exp: tail.exponent,
            kinks: Vec::new(),
            monotone: false,
        };
        sp.monotone = sp.check_monotone();
        Ok(sp)
    }

    /// Samples `f` at the knots.
    pub fn tabulate(knots: Vec<T>, tail: PowerTail<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = knots.iter().map(|&r| f(r)).collect();
        Self::new(knots, values, tail)
    }

    /// Radii where the tabulated function is known to lose smoothness; the
    /// quadrature layer splits its panels there.
    pub fn with_kinks(mut self, kinks: Vec<T>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn last(&self) -> T {
        self.knots[self.knots.len() - 1]
    }

    fn segment(&self, r: T) -> usize {
        let m = self.knots.len();
        match self.knots.binary_search_by(|k| k.partial_cmp(&r).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(m - 2),
            Err(i) => i.saturating_sub(1).min(m - 2),
        }
    }

    fn tail_derivs(&self, r: T) -> [T; 4] {
        let e = self.tail_exp;
        let v = self.tail_coef * r.powf(-e);
        [v, -e * v / r, e * (e + T::one()) * v / (r * r), -e * (e + T::one()) * (e + lit(2.0)) * v / (r * r * r)]
    }

    /// Bounds of `|s'|`, `|s''|`, `|s'''|` on the spline part of `[lo, hi]`.
    fn segment_bounds(&self, lo: T, hi: T) -> [T; 3] {
        let m = self.knots.len();
        let (i0, i1) = (self.segment(lo), self.segment(hi.min(self.last())));
        let mut out = [T::zero(); 3];
        for i in i0..=i1.min(m - 2) {
            let h = self.knots[i + 1] - self.knots[i];
            let (mi, mj) = (self.moments[i], self.moments[i + 1]);
            let f2 = mi.abs().max(mj.abs());
            let f1 = self.slope_at_knot(i).abs().max(self.slope_at_knot(i + 1).abs()) + h * f2;
            out[0] = out[0].max(f1);
            out[1] = out[1].max(f2);
            out[2] = out[2].max((mj - mi).abs() / h);
        }
        out
    }

    fn slope_at_knot(&self, i: usize) -> T {
        let m = self.knots.len();
        let j = i.min(m - 2);
        let h = self.knots[j + 1] - self.knots[j];
        let (a, b) = if i == j { (T::one(), T::zero()) } else { (T::zero(), T::one()) };
        self.slope_in(j, a, b, h)
    }

    fn slope_in(&self, i: usize, a: T, b: T, h: T) -> T {
        let six = lit::<T>(6.0);
        let three = lit::<T>(3.0);
        (self.values[i + 1] - self.values[i]) / h - (three * a * a - T::one()) / six * h * self.moments[i]
            + (three * b * b - T::one()) / six * h * self.moments[i + 1]
    }

    fn check_monotone(&self) -> bool {
        let tail_ok = self.tail_exp == T::zero() || self.tail_coef <= T::zero();
        tail_ok
            && (0..self.knots.len() - 1).all(|i| {
                let h = self.knots[i + 1] - self.knots[i];
                (0..=8).all(|k| {
                    let b = T::from_count(k) / lit(8.0);
                    self.slope_in(i, T::one() - b, b, h) >= T::zero()
                })
            })
    }

    fn segment_abs(&self, i: usize) -> T {
        let h = self.knots[i + 1] - self.knots[i];
        let v = self.values[i].abs().max(self.values[i + 1].abs());
        v + h * h / lit(8.0) * self.moments[i].abs().max(self.moments[i + 1].abs())
    }
}

fn clamped_moments<T: Real>(x: &[T], y: &[T], d0: T, dm: T) -> Vec<T> {
    let m = x.len();
    let six = lit::<T>(6.0);
    let two = lit::<T>(2.0);
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<T> = (0..m - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut sub = vec![T::zero(); m];
    let mut diag = vec![T::zero(); m];
    let mut sup = vec![T::zero(); m];
    let mut rhs = vec![T::zero(); m];
    diag[0] = two * h[0];
    sup[0] = h[0];
    rhs[0] = six * (slope[0] - d0);
    for i in 1..m - 1 {
        sub[i] = h[i - 1];
        diag[i] = two * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = six * (slope[i] - slope[i - 1]);
    }
    sub[m - 1] = h[m - 2];
    diag[m - 1] = two * h[m - 2];
    rhs[m - 1] = six * (dm - slope[m - 2]);
    for i in 1..m {
        let w = sub[i] / diag[i - 1];
        diag[i] = diag[i] - w * sup[i - 1];
        rhs[i] = rhs[i] - w * rhs[i - 1];
    }
    let mut out = vec![T::zero(); m];
    out[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        out[i] = (rhs[i] - sup[i] * out[i + 1]) / diag[i];
    }
    out
}

impl<T: Real> RadialProfile<T> for SplineProfile<T> {
    fn phi(&self, r: T) -> T {
        if r >= self.last() {
            return self.tail_derivs(r)[0];
        }
        let i = self.segment(r);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - r) / h;
        let b = T::one() - a;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.moments[i] + (b * b * b - b) * self.moments[i + 1]) * h * h / lit(6.0)
    }
    fn dphi(&self, r: T) -> T {
        if r >= self.last() {
            return self.tail_derivs(r)[1];
        }
        let i = self.segment(r);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - r) / h;
        self.slope_in(i, a, T::one() - a, h)
    }
    fn ddphi(&self, r: T) -> T {
        if r >= self.last() {
            return self.tail_derivs(r)[2];
        }
        let i = self.segment(r);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - r) / h;
        a * self.moments[i] + (T::one() - a) * self.moments[i + 1]
    }
    fn breakpoints(&self) -> Vec<T> {
        let mut b = self.kinks.clone();
        b.push(self.last());
        b
    }
    fn support(&self) -> Option<T> {
        (self.tail_coef == T::zero()).then(|| {
            let mut r = self.last();
            for i in (0..self.knots.len() - 1).rev() {
                if self.values[i] != T::zero() || self.moments[i] != T::zero() || self.moments[i + 1] != T::zero() {
                    break;
                }
                r = self.knots[i];
            }
            r
        })
    }
    fn sup_abs(&self) -> T {
        self.abs_bound_from(T::zero())
    }
    fn abs_bound_from(&self, radius: T) -> T {
        let tail = self.tail_coef.abs() * radius.max(self.last()).powf(-self.tail_exp);
        if radius >= self.last() {
            return tail;
        }
        let i0 = self.segment(radius);
        (i0..self.knots.len() - 1).map(|i| self.segment_abs(i)).fold(tail, T::max)
    }
    fn c11(&self) -> Option<T> {
        let inner = self.moments.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        Some(inner.max(self.tail_derivs(self.last())[2].abs()))
    }
    fn monotone(&self) -> bool {
        self.monotone
    }
    fn d3_bound(&self, lo: T, hi: T) -> Option<T> {
        let rm = self.last();
        if lo > rm {
            let d = self.tail_derivs(lo);
            return Some(radial_third_bound(lo, d[1].abs(), d[2].abs(), d[3].abs(), false));
        }
        if hi >= rm {
            return None;
        }
        let [f1, f2, f3] = self.segment_bounds(lo, hi);
        let general = radial_third_bound(lo, f1, f2, f3, false);
        let origin = radial_third_bound(lo, f1, f2, self.segment_bounds(T::zero(), hi)[2], true);
        Some(general.min(origin))
    }
}
