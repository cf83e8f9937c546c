use crate::real::{lit, Real};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre<T: Real>(order: usize) -> (Vec<T>, Vec<T>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let m = order;
    let mut nodes = vec![0.0_f64; m];
    let mut weights = vec![0.0_f64; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes.into_iter().map(lit).collect(), weights.into_iter().map(lit).collect())
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        GaussRule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights for `[a, b]`.
    pub fn on(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule on `[a, b]` with `panels` equal panels.
    pub fn integrate_uniform(&self, a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
        let h = (b - a) / T::from_count(panels);
        (0..panels)
            .map(|i| {
                let lo = a + h * T::from_count(i);
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// Composite rule on `[a, b]`, `0 < a < b`, on geometric panels with
    /// `per_doubling` panels for each doubling of the radius; suited to
    /// integrands with algebraic behaviour at `a`.
    pub fn integrate_graded(&self, a: T, b: T, per_doubling: usize, mut f: impl FnMut(T) -> T) -> T {
        if !(b > a) {
            return T::zero();
        }
        let doublings = (b / a).log2().ceil().max(T::one()).to_f64_lossy() as usize;
        let panels = doublings.max(1) * per_doubling;
        let ratio = (b / a).powf(T::one() / T::from_count(panels));
        let mut lo = a;
        let mut total = T::zero();
        for i in 0..panels {
            let hi = if i + 1 == panels { b } else { lo * ratio };
            total = total + self.integrate(lo, hi, &mut f);
            lo = hi;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for m in [1usize, 2, 5, 8, 16, 33] {
            let (x, w): (Vec<f64>, Vec<f64>) = gauss_legendre(m);
            for deg in 0..(2 * m) {
                let q: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn mapped_rule() {
        let g = GaussRule::<f64>::new(12);
        let v = g.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
