//! Gamma function, the kernel normalizing constants and the ball-scaling
//! constant `M0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::real::{lit, Real};

// Lanczos approximation, g = 10.900511, eleven terms (Pugh 2004). Relative
// error below 1e-15 for arguments >= 0.5 in double precision.
const LANCZOS_G: f64 = 10.900511;
const LANCZOS_D: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;

/// `sin(pi x)` with the argument reduced exactly before scaling by pi, so
/// relative accuracy survives near the integers.
fn sin_pi<T: Real>(x: T) -> T {
    let two = lit::<T>(2.0);
    let r = x - two * (x / two).round();
    (T::PI() * r).sin()
}

/// The Gamma function on the real line.
///
/// Uses a Lanczos sum for `x >= 1/2` and the reflection formula below it;
/// small positive integers return the exact factorial.
/// Non-positive integers are poles and return [`Error::Domain`].
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if x.is_nan() {
        return domain("gamma of NaN");
    }
    if x <= T::zero() && x == x.round() {
        return domain(format!("gamma pole at {x}"));
    }
    if x == x.round() && x <= lit(30.0) {
        let k = x.to_f64_lossy() as usize;
        return Ok((1..k).fold(T::one(), |acc, j| acc * T::from_count(j)));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        let s = sin_pi(x);
        T::PI() / (s * gamma_unchecked(T::one() - x))
    } else {
        let s = LANCZOS_D
            .iter()
            .enumerate()
            .skip(1)
            .fold(lit::<T>(LANCZOS_D[0]), |acc, (k, &d)| {
                acc + lit::<T>(d) / (x + T::from_count(k) - T::one())
            });
        let base = (x - half + lit(LANCZOS_G)) / T::E();
        s * lit::<T>(TWO_SQRT_E_OVER_PI) * base.powf(x - half)
    }
}

/// Surface area `|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)` of the unit sphere in R^n.
pub fn sphere_area<T: Real>(n: usize) -> T {
    let half_n = lit::<T>(n as f64 / 2.0);
    lit::<T>(2.0) * T::PI().powf(half_n) / gamma_unchecked(half_n)
}

fn check_order<T: Real>(what: &str, s: T) -> Result<()> {
    if !(s > T::zero() && s < lit(2.0)) {
        return domain(format!("{what} = {s} must lie in (0, 2)"));
    }
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("dimension {n} must be at least 2"));
    }
    Ok(())
}

/// Normalizing constant of the Riesz kernel `|x|^{-n+(2-sigma)}`:
/// `Gamma((n+sigma-2)/2) / (pi^{n/2} 2^{2-sigma} Gamma((2-sigma)/2))`.
pub fn norm_const_pos<T: Real>(n: usize, sigma: T) -> Result<T> {
    check_dim(n)?;
    check_order("sigma", sigma)?;
    let two = lit::<T>(2.0);
    let nn = T::from_count(n);
    let num = gamma_fn((nn + sigma - two) / two)?;
    let den = T::PI().powf(nn / two) * two.powf(two - sigma) * gamma_fn((two - sigma) / two)?;
    Ok(num / den)
}

/// Normalizing constant of the order-`s` singular kernel:
/// `2^s Gamma((n+s)/2) / (pi^{n/2} |Gamma(-s/2)|)`.
///
/// `|Gamma(-s/2)|` is evaluated as `Gamma(1-s/2) / (s/2)`, which keeps full
/// relative accuracy as `s` approaches either end of `(0, 2)`.
pub fn norm_const_neg<T: Real>(n: usize, s: T) -> Result<T> {
    check_dim(n)?;
    check_order("s", s)?;
    let two = lit::<T>(2.0);
    let nn = T::from_count(n);
    let half_s = s / two;
    let abs_gamma_neg = gamma_fn(T::one() - half_s)? / half_s;
    Ok(two.powf(s) * gamma_fn((nn + s) / two)? / (T::PI().powf(nn / two) * abs_gamma_neg))
}

/// Smallest `M0 > 1` with `((3 M0 - 3) / 6)^{-n + (2 - sigma)} <= 1/2`, i.e.
/// the equality solution `1 + 2 * 2^{1/(n-2+sigma)}`.
pub fn compute_m0<T: Real>(n: usize, sigma: T) -> Result<T> {
    check_dim(n)?;
    if !(sigma > T::zero()) {
        return domain(format!("sigma = {sigma} must be positive"));
    }
    let expo = T::from_count(n) - lit(2.0) + sigma;
    Ok(T::one() + lit::<T>(2.0) * lit::<T>(2.0).powf(expo.recip()))
}

/// Left-hand side of the defining inequality for `M0`; equals 1/2 at
/// [`compute_m0`].
pub fn m0_expression<T: Real>(n: usize, sigma: T, m0: T) -> T {
    let three = lit::<T>(3.0);
    let base = (three * m0 - three) / lit(6.0);
    base.powf(-T::from_count(n) + (lit::<T>(2.0) - sigma))
}

/// Dimension, order and ellipticity of a nonlocal operator.
///
/// `big_lambda` is the upper ellipticity constant; `eta` an optional lower
/// cutoff `A >= eta Id` for the admissible coefficient matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<T> {
    pub n: usize,
    pub sigma: T,
    pub lambda: T,
    #[serde(rename = "Lambda")]
    pub big_lambda: T,
    #[serde(default)]
    pub eta: T,
}

impl<T: Real> KernelParams<T> {
    pub fn new(n: usize, sigma: T, lambda: T, big_lambda: T) -> Result<Self> {
        Self::with_eta(n, sigma, lambda, big_lambda, T::zero())
    }

    pub fn with_eta(n: usize, sigma: T, lambda: T, big_lambda: T, eta: T) -> Result<Self> {
        let p = KernelParams { n, sigma, lambda, big_lambda, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        check_order("sigma", self.sigma)?;
        if !(self.lambda > T::zero() && self.lambda <= self.big_lambda) {
            return domain(format!(
                "ellipticity requires 0 < lambda <= Lambda, got {} and {}",
                self.lambda, self.big_lambda
            ));
        }
        if !(self.eta >= T::zero() && self.eta <= self.lambda) {
            return domain(format!("eta = {} must lie in [0, lambda]", self.eta));
        }
        Ok(())
    }

    /// Same parameters with the order replaced by `2 - sigma`.
    pub fn dual_order(&self) -> T {
        lit::<T>(2.0) - self.sigma
    }

    pub fn constants(&self) -> Result<Constants<T>> {
        Constants::new(self.n, self.sigma)
    }
}

/// The normalizing constants attached to `(n, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants<T> {
    /// Riesz kernel constant for order `2 - sigma`.
    pub a_pos: T,
    /// Singular kernel constant for order `sigma`.
    pub a_neg: T,
    /// Singular kernel constant for order `2 - sigma`.
    pub a_neg_dual: T,
    pub m0: T,
}

impl<T: Real> Constants<T> {
    pub fn new(n: usize, sigma: T) -> Result<Self> {
        Ok(Constants {
            a_pos: norm_const_pos(n, sigma)?,
            a_neg: norm_const_neg(n, sigma)?,
            a_neg_dual: norm_const_neg(n, lit::<T>(2.0) - sigma)?,
            m0: compute_m0(n, sigma)?,
        })
    }

    /// Relative defect of `a_neg = sigma (n + sigma - 2) a_pos`.
    pub fn identity_defect(&self, n: usize, sigma: T) -> T {
        let rhs = sigma * (T::from_count(n) + sigma - lit(2.0)) * self.a_pos;
        ((self.a_neg - rhs) / self.a_neg).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gamma_closed_forms() {
        assert_eq!(gamma_fn(1.0_f64).unwrap(), 1.0);
        assert_relative_eq!(gamma_fn(0.5_f64).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(-0.5_f64).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(5.0_f64).unwrap(), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn gamma_reference_values() {
        // mpmath, 30 digits, rounded to double.
        let refs: [(f64, f64); 8] = [
            (0.1, 9.513507698668731836),
            (1.75, 0.9190625268488832338),
            (-0.75, -4.8341465442958777),
            (-9.5, 2.7721279115751021e-6),
            (-3.25, 0.53625072791638543),
            (12.3, 83385367.89997001),
            (33.5, 1.5058569756267019e36),
            (50.0, 6.0828186403426756e62),
        ];
        for (x, g) in refs {
            assert_relative_eq!(gamma_fn(x).unwrap(), g, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_poles_rejected() {
        for x in [0.0_f64, -1.0, -7.0] {
            assert!(matches!(gamma_fn(x), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn constants_by_hand() {
        assert_relative_eq!(norm_const_pos(2, 1.0_f64).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(norm_const_pos(3, 1.0_f64).unwrap(), 1.0 / (2.0 * PI * PI), max_relative = 1e-14);
        assert_relative_eq!(norm_const_neg(2, 1.0_f64).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn constant_identity_at_three_halves() {
        let c = Constants::new(2, 1.5_f64).unwrap();
        assert_relative_eq!(c.a_neg, 1.5 * 1.5 * c.a_pos, max_relative = 1e-13);
    }

    #[test]
    fn order_out_of_range() {
        assert!(norm_const_pos(2, 2.0_f64).is_err());
        assert!(norm_const_neg(2, 0.0_f64).is_err());
        assert!(norm_const_neg(1, 1.0_f64).is_err());
    }

    #[test]
    fn scaled_constant_endpoint_limits() {
        // s -> 0+: Gamma(n/2) / (4 pi^{n/2});  s -> 2-: Gamma((n+2)/2) / pi^{n/2}.
        for n in [2usize, 3, 4] {
            let nn = n as f64;
            let lo = gamma_fn(nn / 2.0).unwrap() / (4.0 * PI.powf(nn / 2.0));
            let hi = gamma_fn((nn + 2.0) / 2.0).unwrap() / PI.powf(nn / 2.0);
            let s = 1e-4;
            let at_lo = norm_const_neg(n, s).unwrap() / (s * (2.0 - s));
            let at_hi = norm_const_neg(n, 2.0 - s).unwrap() / (s * (2.0 - s));
            assert!((at_lo - lo).abs() <= 1e-3 * lo);
            assert!((at_hi - hi).abs() <= 1e-3 * hi);
        }
        // n = 2: the s -> 2 end is Gamma(2)/pi.
        let s = 2.0 - 1e-4;
        let v = norm_const_neg(2, s).unwrap() / (s * (2.0 - s));
        assert!((v - 1.0 / PI).abs() < 1e-3);
    }

    #[test]
    fn m0_values() {
        assert_relative_eq!(compute_m0(3, 1.0_f64).unwrap(), 1.0 + 2.0 * 2f64.sqrt(), max_relative = 1e-15);
        let near_two = compute_m0(2, 2.0_f64 - 1e-9).unwrap();
        assert!((near_two - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-8);
        let cap = 1.0 + 2.0 * 2f64.powf(1.0 / 1.1);
        for s in [0.1_f64, 1.0, 1.9] {
            let m0 = compute_m0(3, s).unwrap();
            assert!(m0 <= cap * (1.0 + 1e-15));
            assert!((m0_expression(3, s, m0) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_params_validation() {
        assert!(KernelParams::new(2, 1.0_f64, 1.0, 2.0).is_ok());
        assert!(KernelParams::new(2, 2.5_f64, 1.0, 2.0).is_err());
        assert!(KernelParams::new(2, 1.0_f64, 2.0, 1.0).is_err());
        assert!(KernelParams::with_eta(2, 1.0_f64, 1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn single_precision_instantiation() {
        let g: f32 = gamma_fn(4.5_f32).unwrap();
        assert!((g - 11.631_728).abs() < 1e-4);
    }
}
