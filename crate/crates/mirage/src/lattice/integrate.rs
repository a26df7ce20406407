//! Adaptive Dormand–Prince 5(4) integration of `dpsi/dt = -i H psi`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::Complex64;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, initial_step: 1e-3, max_step: 1.0 }
    }
}

const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rhs(h: &CsrMatrix, y: &[Complex64], out: &mut [Complex64]) {
    h.mul_vec_into(y, out);
    for v in out.iter_mut() {
        *v = Complex64::new(v.im, -v.re);
    }
}

/// Integrates from `t_grid[0]` through every grid time, calling
/// `observe(index, t, state)` at each one. `t_grid` must be non-decreasing.
pub fn integrate<F>(h: &CsrMatrix, psi0: &[Complex64], t_grid: &[f64], control: StepControl, mut observe: F) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    let n = h.dim();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: psi0.len() });
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("time grid must be non-decreasing"));
    }
    let Some(&t_start) = t_grid.first() else { return Ok(()) };
    let zero = Complex64::new(0.0, 0.0);
    let mut y = psi0.to_vec();
    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    rhs(h, &y, &mut k[0]);
    let mut t = t_start;
    let mut step = control.initial_step;
    for (index, &target) in t_grid.iter().enumerate() {
        while t < target {
            let remaining = target - t;
            let clipped = step.min(remaining).min(control.max_step);
            if clipped < 1e-14 * t.abs().max(1.0) && clipped < remaining {
                return Err(Error::StepUnderflow { t });
            }
            for s in 0..6 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, a) in A[s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += k[j][i] * (clipped * a);
                        }
                    }
                    if s == 5 {
                        y_new[i] = acc;
                    } else {
                        stage[i] = acc;
                    }
                }
                let tail = &mut k[s + 1..];
                if s == 5 {
                    rhs(h, &y_new, &mut tail[0]);
                } else {
                    rhs(h, &stage, &mut tail[0]);
                }
            }
            let mut err = 0.0f64;
            for i in 0..n {
                let mut e = zero;
                for (j, c) in ERR.iter().enumerate() {
                    if *c != 0.0 {
                        e += k[j][i] * c;
                    }
                }
                let scale = control.abs_tol + control.rel_tol * y[i].norm().max(y_new[i].norm());
                err = err.max((e * clipped).norm() / scale);
            }
            if err <= 1.0 {
                t = if clipped == remaining { target } else { t + clipped };
                core::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // A step shortened to land on the grid says little about the error scale.
            let landed = err <= 1.0 && clipped < step.min(control.max_step);
            if !landed {
                step = clipped * factor;
            }
            if !step.is_finite() {
                return Err(Error::StepUnderflow { t });
            }
        }
        observe(index, t, &y);
    }
    Ok(())
}
