//! Fourier transforms along a horizontal line `Im omega = eta` above every
//! singularity, with an exactly transformable large-`omega` reference
//! subtracted first.
//!
//! For `t >= 0`,
//!
//! ```text
//! f(t) = ∫ dω/2π e^{-iωt} F(ω) = e^{ηt} ∫ dx/2π e^{-ixt} F(x + iη)
//! ```
//!
//! The reference is a truncated moment series `sum_k M_k / (ω - c)^{k+1}`
//! whose transform is `-i e^{-ict} sum_k M_k (-it)^k / k!`. With the moments
//! of the underlying lattice operator the remainder decays fast enough that a
//! plain trapezoid sum on a finite window converges, and the `t -> 0+` limit
//! comes out right.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::CsrMatrix;
use crate::Complex64;

/// Equally spaced points `x0 + k h + i eta`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    pub eta: f64,
    pub x0: f64,
    pub h: f64,
    pub n: usize,
}

impl LineGrid {
    /// Symmetric window `[-span, span)` with `n` points.
    pub fn symmetric(eta: f64, span: f64, n: usize) -> Self {
        Self { eta, x0: -span, h: 2.0 * span / n as f64, n }
    }

    pub fn point(&self, k: usize) -> Complex64 {
        Complex64::new(self.x0 + self.h * k as f64, self.eta)
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(|k| self.point(k))
    }
}

const RESEED: usize = 2048;

/// `e^{eta t} h/2π sum_k e^{-i x_k t} samples[k]` at each time.
pub fn line_transform(grid: &LineGrid, samples: &[Complex64], times: &[f64]) -> Vec<Complex64> {
    let scale = grid.h / (2.0 * core::f64::consts::PI);
    times
        .iter()
        .map(|&t| {
            let step = Complex64::new(0.0, -grid.h * t).exp();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut phase = Complex64::new(1.0, 0.0);
            for (k, s) in samples.iter().enumerate() {
                if k % RESEED == 0 {
                    phase = Complex64::new(0.0, -(grid.x0 + grid.h * k as f64) * t).exp();
                }
                acc += phase * s;
                phase *= step;
            }
            acc * (scale * (grid.eta * t).exp())
        })
        .collect()
}

/// Truncated series `sum_k moments[k] / (ω - center)^{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReference {
    pub center: Complex64,
    pub moments: Vec<Complex64>,
}

impl MomentReference {
    pub fn eval(&self, omega: Complex64) -> Complex64 {
        let inv = (omega - self.center).inv();
        let mut power = inv;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.moments {
            acc += m * power;
            power *= inv;
        }
        acc
    }

    /// Transform at `t >= 0`, the `t -> 0+` limit at zero.
    pub fn transform(&self, t: f64) -> Complex64 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, m) in self.moments.iter().enumerate() {
            if k > 0 {
                term *= Complex64::new(0.0, -t) / k as f64;
            }
            acc += m * term;
        }
        Complex64::new(0.0, -1.0) * (Complex64::new(0.0, -1.0) * self.center * t).exp() * acc
    }
}

/// `<row_k| (H - c)^k |start>` for `k = 0..=order`, for every requested row.
pub fn lattice_moments(h: &CsrMatrix, start: usize, rows: &[usize], center: Complex64, order: usize) -> Vec<Vec<Complex64>> {
    let n = h.dim();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[start] = Complex64::new(1.0, 0.0);
    let mut out = vec![Vec::with_capacity(order + 1); rows.len()];
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..=order {
        for (o, &r) in out.iter_mut().zip(rows) {
            o.push(v[r]);
        }
        h.mul_vec_into(&v, &mut next);
        for (x, y) in next.iter_mut().zip(&v) {
            *x -= center * y;
        }
        core::mem::swap(&mut v, &mut next);
    }
    out
}

/// Fails unless the line clears the singularity ceiling.
pub fn require_clearance(eta: f64, ceiling: f64) -> Result<()> {
    if !(eta > ceiling) {
        return Err(Error::ContourTooLow { eta, top: ceiling });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reference_transform_of_simple_pole() {
        let e = c(0.3, -0.2);
        let r = MomentReference { center: e, moments: vec![c(1.0, 0.0)] };
        for t in [0.0, 1.0, 7.5] {
            assert!((r.transform(t) - c(0.0, -1.0) * (c(0.0, -1.0) * e * t).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn higher_pole_transform_matches_quadrature() {
        // 1/(ω - c)^3 transforms to -i (-it)^2/2 e^{-ict}.
        let center = c(0.1, -0.5);
        let r = MomentReference { center, moments: vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] };
        let grid = LineGrid::symmetric(0.2, 400.0, 1 << 17);
        let samples: Vec<_> = grid.points().map(|w| r.eval(w)).collect();
        let times = [0.5, 2.0, 6.0];
        let numeric = line_transform(&grid, &samples, &times);
        for (t, v) in times.iter().zip(numeric) {
            assert!((v - r.transform(*t)).norm() < 1e-6, "{t}: {v} vs {}", r.transform(*t));
        }
    }

    #[test]
    fn moments_of_two_level_system() {
        let h = CsrMatrix::from_triplets(2, vec![(0, 1, c(0.5, 0.0)), (1, 0, c(0.5, 0.0)), (1, 1, c(1.0, 0.0))]).unwrap();
        let m = lattice_moments(&h, 0, &[0, 1], c(0.0, 0.0), 3);
        assert_eq!(m[0], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.25, 0.0), c(0.25, 0.0)]);
        assert_eq!(m[1], vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.625, 0.0)]);
    }

    #[test]
    fn clearance_is_strict() {
        assert!(require_clearance(0.0, 0.0).is_err());
        assert!(require_clearance(0.01, 0.0).is_ok());
    }
}
