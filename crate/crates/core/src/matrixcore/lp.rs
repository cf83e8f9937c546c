//! Exact extremal traces over the ellipticity class.
//!
//! The class `{A >= eta Id, lambda Id <= A_sigma <= Lambda Id}` is convex and
//! invariant under orthogonal conjugation. Write `D = V diag(d) V^T`. For any
//! admissible `A`, the pinched matrix `V diag(diag(V^T A V)) V^T` is an average
//! of the conjugates `V S V^T A V S V^T` over sign matrices `S`, hence lies in
//! the class, and has the same `Tr(A D)`. The optimum is therefore attained by
//! some `A = V diag(a) V^T`, and the problem reduces to the linear program
//!
//! ```text
//!     optimize  sum_i a_i d_i
//!     s.t.      a_i >= eta,
//!               lambda (n + sigma) <= sigma a_i + sum_j a_j <= Lambda (n + sigma).
//! ```
//!
//! The feasible polytope is bounded (`a_i <= Lambda (n + sigma) / (1 + sigma)`)
//! so the optimum sits at a vertex; vertices are enumerated exhaustively.

use crate::error::{Error, Result};
use crate::real::{lit, Real};
use crate::special::KernelParams;

use super::SymMatrix;

/// Which extremal operator: `Minus` is the infimum, `Plus` the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

#[derive(Debug, Clone)]
pub struct Extremal<T> {
    pub value: T,
    /// Optimal coefficient matrix.
    pub argopt: SymMatrix<T>,
    /// Its eigenvalues in the eigenbasis of the input, paired with `d`.
    pub coeffs: Vec<T>,
}

struct Halfspace<T> {
    row: Vec<T>,
    rhs: T,
    upper: bool,
}

fn constraints<T: Real>(n: usize, p: &KernelParams<T>) -> Vec<Halfspace<T>> {
    let nps = T::from_count(n) + p.sigma;
    let mut cons = Vec::with_capacity(3 * n);
    for i in 0..n {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        cons.push(Halfspace { row: e, rhs: p.eta, upper: false });
        let mut row = vec![T::one(); n];
        row[i] = row[i] + p.sigma;
        cons.push(Halfspace { row: row.clone(), rhs: p.lambda * nps, upper: false });
        cons.push(Halfspace { row, rhs: p.big_lambda * nps, upper: true });
    }
    cons
}

/// Solves the square system by Gaussian elimination with partial pivoting.
/// Returns `None` when it is numerically singular.
fn solve<T: Real>(mut m: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() < lit(1e-12) {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                m[r][c] = m[r][c] - f * m[col][c];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let s: T = ((r + 1)..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

fn next_combination(idx: &mut [usize], total: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < total - k + i {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Optimizes `sum_i a_i d_i` over the reduced polytope by vertex enumeration.
pub fn extremal_diagonal<T: Real>(d: &[T], p: &KernelParams<T>, sign: Sign) -> Result<(T, Vec<T>)> {
    let n = d.len();
    let cons = constraints(n, p);
    let scale = p.big_lambda * (T::from_count(n) + p.sigma);
    let feas_tol = lit::<T>(1e-10) * scale.max(T::one());
    let mut best: Option<(T, Vec<T>)> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let m = idx.iter().map(|&k| cons[k].row.clone()).collect();
        let b = idx.iter().map(|&k| cons[k].rhs).collect();
        if let Some(a) = solve(m, b) {
            let feasible = cons.iter().all(|h| {
                let v: T = h.row.iter().zip(&a).map(|(&r, &x)| r * x).sum();
                if h.upper {
                    v <= h.rhs + feas_tol
                } else {
                    v >= h.rhs - feas_tol
                }
            });
            if feasible {
                let val: T = a.iter().zip(d).map(|(&x, &y)| x * y).sum();
                let better = match &best {
                    None => true,
                    Some((bv, _)) => match sign {
                        Sign::Minus => val < *bv,
                        Sign::Plus => val > *bv,
                    },
                };
                if better {
                    best = Some((val, a));
                }
            }
        }
        if !next_combination(&mut idx, cons.len()) {
            break;
        }
    }
    best.ok_or_else(|| Error::Infeasible("ellipticity class has no admissible matrix".into()))
}

/// Infimum (`Minus`) or supremum (`Plus`) of `Tr(A D)` over the class, with
/// an optimal `A`.
///
/// The supremum is evaluated as `-inf Tr(A (-D))`, so `M^+(D) = -M^-(-D)`
/// holds bit for bit.
pub fn pucci_extremal_trace<T: Real>(d: &SymMatrix<T>, p: &KernelParams<T>, sign: Sign) -> Result<Extremal<T>> {
    d.check_dim(p.n)?;
    if sign == Sign::Plus {
        let e = pucci_extremal_trace(&d.scale(-T::one()), p, Sign::Minus)?;
        return Ok(Extremal { value: -e.value, ..e });
    }
    let (vals, vecs) = d.eigen();
    let (value, coeffs) = extremal_diagonal(&vals, p, sign)?;
    let argopt = SymMatrix::from_eigen(&coeffs, &vecs);
    Ok(Extremal { value, argopt, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::in_class;

    fn params(n: usize) -> KernelParams<f64> {
        KernelParams::new(n, 1.0, 0.5, 2.0).unwrap()
    }

    #[test]
    fn identity_minimum_is_n_lambda() {
        for n in [2usize, 3] {
            let p = params(n);
            let e = pucci_extremal_trace(&SymMatrix::identity(n), &p, Sign::Minus).unwrap();
            assert!((e.value - n as f64 * p.lambda).abs() < 1e-12);
            assert!(in_class(&e.argopt, &p));
        }
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let p = params(3);
        for s in [Sign::Minus, Sign::Plus] {
            assert_eq!(pucci_extremal_trace(&SymMatrix::zeros(3), &p, s).unwrap().value, 0.0);
        }
    }

    #[test]
    fn argopt_attains_value() {
        let p = params(2);
        let d = SymMatrix::from_fn(2, |i, j| [[1.0, -0.7], [-0.7, -2.0]][i][j]);
        for s in [Sign::Minus, Sign::Plus] {
            let e = pucci_extremal_trace(&d, &p, s).unwrap();
            assert!((e.argopt.trace_product(&d) - e.value).abs() < 1e-10);
            assert!(in_class(&e.argopt, &p));
        }
    }

    #[test]
    fn repeated_eigenvalues_basis_independent() {
        let p = params(3);
        let d = SymMatrix::diag(&[1.0, 1.0, -2.0]);
        let (c, s) = (0.8_f64, 0.6_f64);
        let q = [c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0];
        let a = pucci_extremal_trace(&d, &p, Sign::Minus).unwrap().value;
        let b = pucci_extremal_trace(&d.conjugate(&q), &p, Sign::Minus).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            pucci_extremal_trace(&SymMatrix::<f64>::identity(2), &params(3), Sign::Minus),
            Err(Error::Dimension { .. })
        ));
    }
}
