//! Shift-and-invert eigenpairs of sparse operators.
//!
//! The matrix is permuted by reverse Cuthill–McKee so the shifted operator
//! becomes banded, then factored by banded LU with partial pivoting.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Reverse Cuthill–McKee ordering of the symmetrized sparsity pattern.
pub fn reverse_cuthill_mckee(m: &CsrMatrix) -> Vec<usize> {
    let n = m.dim();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in m.triplets() {
        if r != c {
            adjacency[r].push(c);
            adjacency[c].push(r);
        }
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    while order.len() < n {
        let start = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).expect("unvisited node remains");
        visited[start] = true;
        queue.push_back(start);
        while let Some(node) = queue.pop_front() {
            order.push(node);
            let mut next: Vec<usize> = adjacency[node].iter().copied().filter(|&j| !visited[j]).collect();
            next.sort_by_key(|&j| degree[j]);
            for j in next {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Banded LU factors of a square matrix with lower/upper bandwidths `lower`, `upper`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    /// Width of the U rows after fill from pivoting.
    span: usize,
    /// Row `i` holds U[i][i..=i+span].
    upper_rows: Vec<Complex64>,
    /// Step `i` holds the multipliers for rows `i+1..=i+lower`.
    multipliers: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        let n = m.dim();
        let (mut lower, mut upper) = (0usize, 0usize);
        for (r, c, _) in m.triplets() {
            if r > c {
                lower = lower.max(r - c);
            } else {
                upper = upper.max(c - r);
            }
        }
        let span = lower + upper;
        let width = 2 * lower + upper + 1;
        // Working rows: row r stores columns base(r)..base(r)+width.
        let base = |r: usize| r.saturating_sub(lower);
        let mut work = vec![ZERO; n * width];
        for (r, c, v) in m.triplets() {
            work[r * width + (c - base(r))] += v;
        }
        let mut multipliers = vec![ZERO; n * lower.max(1)];
        let mut pivots = vec![0usize; n];
        let scale = m.triplets().map(|(_, _, v)| v.norm()).fold(0.0, f64::max).max(1e-300);
        for i in 0..n {
            let last_row = (i + lower).min(n - 1);
            let last_col = (i + span).min(n - 1);
            let at = |work: &Vec<Complex64>, r: usize, c: usize| work[r * width + (c - base(r))];
            let mut p = i;
            let mut best = at(&work, i, i).norm();
            for r in i + 1..=last_row {
                let v = at(&work, r, i).norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= 1e-15 * scale {
                return Err(Error::SingularMatrix);
            }
            pivots[i] = p;
            if p != i {
                for c in i..=last_col {
                    let a = i * width + (c - base(i));
                    let b = p * width + (c - base(p));
                    work.swap(a, b);
                }
            }
            let pivot = at(&work, i, i);
            for r in i + 1..=last_row {
                let factor = at(&work, r, i) / pivot;
                multipliers[i * lower + (r - i - 1)] = factor;
                if factor == ZERO {
                    continue;
                }
                for c in i + 1..=last_col {
                    let u = at(&work, i, c);
                    if u != ZERO {
                        work[r * width + (c - base(r))] -= factor * u;
                    }
                }
            }
        }
        let mut upper_rows = vec![ZERO; n * (span + 1)];
        for i in 0..n {
            for c in i..=(i + span).min(n - 1) {
                upper_rows[i * (span + 1) + (c - i)] = work[i * width + (c - base(i))];
            }
        }
        Ok(Self { n, lower, span, upper_rows, multipliers, pivots })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            b.swap(i, self.pivots[i]);
            let bi = b[i];
            if bi == ZERO {
                continue;
            }
            for r in i + 1..=(i + self.lower).min(n.saturating_sub(1)) {
                b[r] -= self.multipliers[i * self.lower + (r - i - 1)] * bi;
            }
        }
        for i in (0..n).rev() {
            let row = &self.upper_rows[i * (self.span + 1)..(i + 1) * (self.span + 1)];
            let mut acc = b[i];
            for c in i + 1..=(i + self.span).min(n - 1) {
                acc -= row[c - i] * b[c];
            }
            b[i] = acc / row[0];
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual norm and Rayleigh quotient of a trial vector.
fn residual(m: &CsrMatrix, v: &[Complex64]) -> (f64, Complex64) {
    let hv = m.mul_vec(v);
    let vv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    let rq = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum::<Complex64>() / vv;
    let r = hv.iter().zip(v).map(|(h, x)| (h - rq * x).norm_sqr()).sum::<f64>().sqrt() / vv.sqrt();
    (r, rq)
}

fn shifted(m: &CsrMatrix, order: &[usize], shift: Complex64) -> Result<CsrMatrix> {
    let mut permuted = m.submatrix(order)?;
    let triplets: Vec<_> = permuted.triplets().chain((0..m.dim()).map(|i| (i, i, -shift))).collect();
    permuted = CsrMatrix::from_triplets(m.dim(), triplets)?;
    Ok(permuted)
}

/// Eigenpair nearest `target`: shift-invert iteration followed by Rayleigh
/// quotient refinement until the residual falls below `tol`.
/// The returned vector has unit Euclidean norm.
pub fn eigenpair_near(m: &CsrMatrix, target: Complex64, tol: f64, max_iterations: usize) -> Result<(Complex64, Vec<Complex64>)> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidParams("empty operator"));
    }
    let order = reverse_cuthill_mckee(m);
    // A tiny offset keeps the shift off an exact eigenvalue.
    let mut shift = target + Complex64::new(1e-9, 7e-10);
    let mut lu = match BandedLu::factor(&shifted(m, &order, shift)?) {
        Ok(lu) => lu,
        Err(_) => {
            shift += Complex64::new(1e-7, 1e-7);
            BandedLu::factor(&shifted(m, &order, shift)?)?
        }
    };
    // Deterministic, generic start vector.
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.37 * ((i * 7919 % 101) as f64 / 101.0), 0.1 * ((i % 13) as f64))).collect();
    let scale = 1.0 / norm(&v);
    v.iter_mut().for_each(|x| *x *= scale);
    let mut best = f64::INFINITY;
    let mut refined = false;
    for _ in 0..max_iterations {
        lu.solve(&mut v);
        let s = norm(&v);
        if !s.is_finite() || s == 0.0 {
            return Err(Error::NoConvergence { iterations: 0, residual: f64::NAN });
        }
        v.iter_mut().for_each(|x| *x /= s);
        let mut unpermuted = vec![ZERO; n];
        for (new, &old) in order.iter().enumerate() {
            unpermuted[old] = v[new];
        }
        let (r, lambda) = residual(m, &unpermuted);
        best = best.min(r);
        if r < tol {
            return Ok((lambda, unpermuted));
        }
        if r < 1e-5 && !refined {
            // One Rayleigh-quotient refactorization sharpens convergence.
            let candidate = lambda + Complex64::new(1e-13, 1e-13);
            if let Ok(f) = BandedLu::factor(&shifted(m, &order, candidate)?) {
                lu = f;
            }
            refined = true;
        }
    }
    Err(Error::NoConvergence { iterations: max_iterations, residual: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ring(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, (i + 1) % n, c(1.0, 0.0)));
            t.push(((i + 1) % n, i, c(0.5, 0.0)));
            t.push((i, i, c(0.01 * i as f64, -0.1)));
        }
        CsrMatrix::from_triplets(n, t).unwrap()
    }

    #[test]
    fn rcm_is_a_permutation_and_narrows_ring() {
        let m = ring(40);
        let mut order = reverse_cuthill_mckee(&m);
        let p = m.submatrix(&order).unwrap();
        let bw = p.triplets().map(|(r, c, _)| r.abs_diff(c)).max().unwrap();
        assert!(bw <= 2, "bandwidth {bw}");
        order.sort_unstable();
        assert_eq!(order, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn banded_lu_solves_against_dense() {
        let m = ring(25);
        let order = reverse_cuthill_mckee(&m);
        let p = m.submatrix(&order).unwrap();
        let lu = BandedLu::factor(&p).unwrap();
        let b: Vec<Complex64> = (0..25).map(|i| c(i as f64, 1.0)).collect();
        let mut x = b.clone();
        lu.solve(&mut x);
        let back = p.mul_vec(&x);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 1, c(2.0, 0.0)), (1, 0, c(3.0, 0.0)), (1, 2, c(1.0, 0.0)), (2, 1, c(1.0, 0.0)), (2, 2, c(1.0, 0.0))]).unwrap();
        let lu = BandedLu::factor(&m).unwrap();
        let mut x = vec![c(2.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)];
        lu.solve(&mut x);
        let back = m.mul_vec(&x);
        assert!((back[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((back[1] - c(4.0, 0.0)).norm() < 1e-12);
        assert!((back[2] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenpair_matches_dense_spectrum() {
        let m = ring(30);
        let dense = m.to_dense();
        let eig = dense.schur().eigenvalues().unwrap();
        let target = c(0.3, 0.2);
        let nearest = eig.iter().copied().min_by(|a, b| (a - target).norm().partial_cmp(&(b - target).norm()).unwrap()).unwrap();
        let (lambda, v) = eigenpair_near(&m, target, 1e-10, 500).unwrap();
        assert!((lambda - nearest).norm() < 1e-9, "{lambda} vs {nearest}");
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }
}
