//! Sampling oracle for the extremal traces, independent of the eigenbasis
//! reduction: it only ever draws full matrices and tests them with
//! [`in_class_within`] at zero slack, so it never exploits the membership
//! tolerance of [`in_class`](super::in_class).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::real::{lit, Real};
use crate::special::KernelParams;

use super::{in_class_within, Sign, SymMatrix};

/// Row-major orthogonal matrix from Gram-Schmidt on a Gaussian draw.
pub fn random_orthogonal<T: Real, R: Rng>(n: usize, rng: &mut R) -> Vec<T> {
    let g: Vec<T> = (0..n * n).map(|_| lit::<T>(rng.sample::<f64, _>(StandardNormal))).collect();
    orthonormalize(n, g)
}

/// Orthonormalizes the columns of a row-major matrix.
pub(crate) fn orthonormalize<T: Real>(n: usize, mut m: Vec<T>) -> Vec<T> {
    for c in 0..n {
        for prev in 0..c {
            let d: T = (0..n).map(|r| m[r * n + c] * m[r * n + prev]).sum();
            for r in 0..n {
                m[r * n + c] = m[r * n + c] - d * m[r * n + prev];
            }
        }
        let nrm = (0..n).map(|r| m[r * n + c] * m[r * n + c]).sum::<T>().sqrt();
        for r in 0..n {
            m[r * n + c] = m[r * n + c] / nrm;
        }
    }
    m
}

fn assemble<T: Real>(a: &[T], q: &[T]) -> SymMatrix<T> {
    SymMatrix::diag(a).conjugate(q)
}

/// Best `Tr(A D)` over `trials` sampled admissible matrices.
///
/// Trial 0 is `lambda Id`. Afterwards trials cycle through fresh draws
/// (uniform diagonal, Haar rotation), joint mutations of the incumbent's
/// eigenvalues and eigenvectors with a self-adjusting step that restarts once
/// it collapses, and log-uniform-scale moves that perturb either the
/// eigenvalues alone or the whole matrix; mutated eigenvalues are clamped to
/// the admissible range. The returned value after `k` trials is the running
/// optimum of one fixed stream, so it is monotone in `trials` for a given
/// seed.
pub fn pucci_oracle_sample<T: Real>(
    d: &SymMatrix<T>,
    p: &KernelParams<T>,
    sign: Sign,
    trials: usize,
    seed: u64,
) -> T {
    let n = p.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amax = p.big_lambda * (T::from_count(n) + p.sigma) / (T::one() + p.sigma);
    let better = |v: T, b: T| match sign {
        Sign::Minus => v < b,
        Sign::Plus => v > b,
    };

    let mut best_a = vec![p.lambda; n];
    let mut best_q = {
        let mut q = vec![T::zero(); n * n];
        for i in 0..n {
            q[i * n + i] = T::one();
        }
        q
    };
    let mut best = assemble(&best_a, &best_q).trace_product(d);
    let mut step = lit::<T>(0.25);

    for t in 1..trials {
        let kind = t % 3;
        let (a, q) = match kind {
            1 => {
                let a: Vec<T> = best_a
                    .iter()
                    .map(|&x| (x + step * amax * lit::<T>(rng.sample::<f64, _>(StandardNormal))).max(p.eta).min(amax))
                    .collect();
                let pert: Vec<T> = best_q
                    .iter()
                    .map(|&x| x + step * lit::<T>(rng.sample::<f64, _>(StandardNormal)))
                    .collect();
                (a, orthonormalize(n, pert))
            }
            2 => {
                let scale = amax * lit::<T>(10f64.powf(-6.0 * rng.random::<f64>()));
                let clamp = |x: T| x.max(p.eta).min(amax);
                if (t / 3) % 2 == 0 {
                    let a: Vec<T> = best_a
                        .iter()
                        .map(|&x| clamp(x + scale * lit::<T>(rng.sample::<f64, _>(StandardNormal))))
                        .collect();
                    (a, best_q.clone())
                } else {
                    let g = SymMatrix::from_fn(n, |_, _| lit::<T>(rng.sample::<f64, _>(StandardNormal)));
                    let cur = assemble(&best_a, &best_q);
                    let moved = SymMatrix::from_fn(n, |i, j| cur.get(i, j) + scale * (g.get(i, j) + g.get(j, i)));
                    let (vals, vecs) = moved.eigen();
                    (vals.into_iter().map(clamp).collect(), vecs.concat())
                }
            }
            _ => {
                let a: Vec<T> = (0..n)
                    .map(|_| p.eta + (amax - p.eta) * lit::<T>(rng.random::<f64>()))
                    .collect();
                (a, random_orthogonal(n, &mut rng))
            }
        };
        let m = assemble(&a, &q);
        let mut improved = false;
        if in_class_within(&m, p, T::zero()) {
            let v = m.trace_product(d);
            if better(v, best) {
                best = v;
                best_a = a;
                best_q = q;
                improved = true;
            }
        }
        if kind == 1 {
            step = if improved { (step * lit(1.5)).min(lit(0.5)) } else { step * lit(0.97) };
            if step < lit(1e-6) {
                step = lit(0.25);
            }
        }
    }
    best
}
