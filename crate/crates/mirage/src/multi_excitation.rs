//! Two-excitation observables of a weakly driven Kerr emitter.
//!
//! The pair function is the frequency convolution
//! `Π(ω) = i ∫ dω'/2π G(ω') G(ω - ω')` along `Im ω' = Im ω / 2`, evaluated
//! as a correction to the uncoupled value `1/(ω - 2Δ')`:
//!
//! ```text
//! Π = 1/(ω - 2Δ') + i ∫ dω'/2π δ(ω') [G(ω - ω') + G_ref(ω - ω')]
//! ```
//!
//! with `G_ref = 1/(ω - Δ')` and `δ = G - G_ref`, so the integrand falls off
//! as `|ω'|^-4`. Everything defaults to the second sheet, where the
//! singularities of `G` sit strictly below the real axis.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{BathParams, Sheet};
use crate::bound_states::EmitterSpec;
use crate::contour::{lattice_moments, line_transform, LineGrid, MomentReference};
use crate::dynamics::{singularity_ceiling, CONTOUR_MARGIN, MOMENT_ORDER};
use crate::error::{Error, Result};
use crate::lattice::{two_excitation_build, Boundary};
use crate::self_energy::bath_resolvent;
use crate::series::{validate_grid, TimeSeries};
use crate::Complex64;

/// Largest quadrature spacing on the convolution line.
const MAX_SPACING: f64 = 0.01;
/// Points per unit of clearance between the line and the singularities.
const POINTS_PER_CLEARANCE: f64 = 5.0;
/// Label of the pair amplitude in `pair_emission_dynamics` output.
pub const PAIR_LABEL: &str = "D";

/// Kerr-nonlinear emitter under a weak coherent drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearEmitterSpec {
    pub base: EmitterSpec,
    /// Energy of double occupation.
    pub u: f64,
    /// Drive amplitude; the weak-drive formulas do not depend on it.
    pub drive_eps: f64,
    pub drive_omega: f64,
}

impl NonlinearEmitterSpec {
    pub fn new(base: EmitterSpec, u: f64, drive_eps: f64, drive_omega: f64) -> Result<Self> {
        if !(u.is_finite() && drive_eps.is_finite() && drive_omega.is_finite()) {
            return Err(Error::InvalidParams("nonlinear emitter parameters must be finite"));
        }
        if drive_eps < 0.0 {
            return Err(Error::InvalidParams("drive amplitude must be non-negative"));
        }
        Ok(Self { base, u, drive_eps, drive_omega })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFunctionValue {
    pub omega: Complex64,
    pub pi: Complex64,
}

/// Single-emitter Green function and its uncoupled reference.
struct SingleGreen<'a> {
    params: &'a BathParams,
    emitter: &'a EmitterSpec,
    sheet: Sheet,
    delta_prime: Complex64,
}

impl<'a> SingleGreen<'a> {
    fn new(params: &'a BathParams, emitter: &'a EmitterSpec, sheet: Sheet) -> Self {
        Self { params, emitter, sheet, delta_prime: emitter.delta_prime() }
    }

    fn eval(&self, omega: Complex64) -> Result<Complex64> {
        let site = self.emitter.site();
        let sigma = bath_resolvent(self.params, omega, site, site, self.sheet)? * self.emitter.omega_rabi.powi(2);
        Ok((omega - self.delta_prime - sigma).inv())
    }

    fn reference(&self, omega: Complex64) -> Complex64 {
        (omega - self.delta_prime).inv()
    }
}

/// Most quadrature points accepted on one line.
const MAX_POINTS: i64 = 1 << 22;

/// Half-width of the convolution window. `Π` does not depend on `U`.
fn convolution_span(params: &BathParams, emitter: &EmitterSpec) -> f64 {
    16.0 * (params.j1 + params.j2 + params.gamma_b + emitter.delta.abs())
}

fn point_count(span: f64, h: f64) -> Result<i64> {
    let half = (span / h).ceil();
    if !(half < MAX_POINTS as f64) {
        return Err(Error::DimensionTooLarge { dimension: half as usize, limit: MAX_POINTS as usize });
    }
    Ok(half as i64)
}

fn spacing(clearance: f64) -> f64 {
    MAX_SPACING.min(clearance / POINTS_PER_CLEARANCE)
}

/// Integral of the leading `-2 Ω² / u^4`-type tail outside `|u| < span`,
/// times `i/2π`, expanded to second order in `omega/span`.
fn tail_estimate(omega_rabi: f64, offset: Complex64, span: f64) -> Complex64 {
    let s = omega_rabi * omega_rabi;
    let value = -4.0 * s * (1.0 / (3.0 * span.powi(3)) + offset * offset / (5.0 * span.powi(5)));
    Complex64::new(0.0, 1.0 / (2.0 * core::f64::consts::PI)) * value
}

/// Same tail integrated exactly along `Im u = eta` for `δ(u) ~ Ω²/u³`,
/// `∫ 2Ω² du / (u³ (ω - u))` over `|Re u| > span`, times `i/2π`. The series
/// is used while `omega` is well inside the window.
fn tail_on_line(omega_rabi: f64, omega: Complex64, eta: f64, span: f64) -> Complex64 {
    if omega.norm() < 0.25 * span {
        return tail_estimate(omega_rabi, omega, span);
    }
    let i = Complex64::new(0.0, 1.0);
    let (a, b) = (Complex64::new(span, eta), Complex64::new(-span, eta));
    // Antiderivative of 1/u - 1/(u - ω); continuous on the line, zero at +∞ and 2πi at -∞.
    let log_ratio = |u: Complex64| u.ln() - (u - omega).ln();
    let cubic = (a.powi(-2) - b.powi(-2)) * 0.5 / omega;
    let square = (a.inv() - b.inv()) / (omega * omega);
    let single = (log_ratio(b) - log_ratio(a) - i * 2.0 * core::f64::consts::PI) / omega.powi(3);
    i / (2.0 * core::f64::consts::PI) * (cubic + square + single) * (2.0 * omega_rabi * omega_rabi)
}

fn line_height(params: &BathParams, emitter: &EmitterSpec, omega: Complex64, sheet: Sheet) -> Result<(f64, f64)> {
    let top = singularity_ceiling(params, core::slice::from_ref(emitter), sheet)?;
    let eta = 0.5 * omega.im;
    let clearance = eta - top;
    if !(clearance > 0.0) {
        return Err(Error::ContourPinched);
    }
    Ok((eta, clearance))
}

pub fn pi_function(params: &BathParams, emitter: &EmitterSpec, omega: Complex64, sheet: Sheet) -> Result<PairFunctionValue> {
    let (eta, clearance) = line_height(params, emitter, omega, sheet)?;
    let green = SingleGreen::new(params, emitter, sheet);
    let h = spacing(clearance);
    let half = point_count(convolution_span(params, emitter), h)?;
    // Points u_j = Re ω/2 + j h + i eta; then ω - u_j = u_{-j}.
    let center = 0.5 * omega.re;
    let point = |j: i64| Complex64::new(center + h * j as f64, eta);
    let g: Vec<Complex64> = (-half..=half).map(|j| green.eval(point(j))).collect::<Result<_>>()?;
    let at = |j: i64| (j + half) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -half..=half {
        let delta = g[at(j)] - green.reference(point(j));
        acc += delta * (g[at(-j)] + green.reference(point(-j)));
    }
    let weight = Complex64::new(0.0, h / (2.0 * core::f64::consts::PI));
    let width = h * (half as f64 + 0.5);
    let pi = (omega - green.delta_prime * 2.0).inv() + acc * weight + tail_estimate(emitter.omega_rabi, Complex64::new(0.0, 0.0), width);
    Ok(PairFunctionValue { omega, pi })
}

/// `D(ω) = (Π^{-1} - U)^{-1}`.
pub fn two_particle_green(params: &BathParams, emitter: &EmitterSpec, omega: Complex64, u: f64, sheet: Sheet) -> Result<Complex64> {
    let pi = pi_function(params, emitter, omega, sheet)?.pi;
    pair_green_from_pi(pi, u)
}

fn pair_green_from_pi(pi: Complex64, u: f64) -> Result<Complex64> {
    if pi.norm() == 0.0 {
        return Err(Error::PiZero);
    }
    let d = pi / (1.0 - pi * u);
    if !d.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(d)
}

/// `D(t) = -i/2 <0| a²(t) a†²(0) |0>` on the second sheet, labelled `D`.
pub fn pair_emission_dynamics(params: &BathParams, emitter: &NonlinearEmitterSpec, t_grid: &[f64]) -> Result<TimeSeries> {
    pair_emission_dynamics_on(params, emitter, t_grid, Sheet::Second)
}

/// `pair_emission_dynamics` on an explicit sheet. The first sheet needs the
/// integration line above the real axis and is slow to converge; it exists
/// for cross-checks.
pub fn pair_emission_dynamics_on(params: &BathParams, emitter: &NonlinearEmitterSpec, t_grid: &[f64], sheet: Sheet) -> Result<TimeSeries> {
    validate_grid(t_grid)?;
    let base = &emitter.base;
    let top = singularity_ceiling(params, core::slice::from_ref(base), sheet)?;
    // The pair line sits twice as high as the single-particle line.
    let eta_pair = 2.0 * (top + CONTOUR_MARGIN);
    let eta = 0.5 * eta_pair;
    let h = spacing(CONTOUR_MARGIN);
    let span_time = 8.0 * (params.j1 + params.j2 + params.gamma_b + base.delta.abs() + emitter.u.abs());
    let span_conv = convolution_span(params, base);
    let k_half = point_count(span_time, h)?;
    let j_half = point_count(span_conv, h)?;
    let green = SingleGreen::new(params, base, sheet);

    // Single-particle samples at u_i = i h + i eta, i in [-k_half - j_half, k_half + j_half].
    let reach = k_half + j_half;
    let point = |i: i64| Complex64::new(h * i as f64, eta);
    let g: Vec<Complex64> = (-reach..=reach).map(|i| green.eval(point(i))).collect::<Result<_>>()?;
    let at = |i: i64| (i + reach) as usize;
    let delta: Vec<Complex64> = (-j_half..=j_half).map(|j| g[at(j)] - green.reference(point(j))).collect();
    let weight = Complex64::new(0.0, h / (2.0 * core::f64::consts::PI));
    let width = h * (j_half as f64 + 0.5);

    let reference = pair_reference(params, emitter, sheet)?;
    let grid = LineGrid { eta: eta_pair, x0: -h * k_half as f64, h, n: 2 * k_half as usize };
    let mut samples = Vec::with_capacity(grid.n);
    for k in -k_half..k_half {
        // ω_k - u_j = u_{k-j}.
        let omega = Complex64::new(h * k as f64, eta_pair);
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, j) in (-j_half..=j_half).enumerate() {
            let other = point(k - j);
            acc += delta[idx] * (g[at(k - j)] + green.reference(other));
        }
        let pi = (omega - green.delta_prime * 2.0).inv() + acc * weight + tail_on_line(base.omega_rabi, omega, eta, width);
        samples.push(pair_green_from_pi(pi, emitter.u)? - reference.eval(omega));
    }
    let values = line_transform(&grid, &samples, t_grid).into_iter().zip(t_grid).map(|(v, &t)| v + reference.transform(t)).collect();
    let mut series = TimeSeries::new(t_grid.to_vec());
    series.push(PAIR_LABEL.into(), values)?;
    Ok(series)
}

/// Moments of the doubly occupied emitter state on a short two-excitation ring.
fn pair_reference(params: &BathParams, emitter: &NonlinearEmitterSpec, sheet: Sheet) -> Result<MomentReference> {
    let local = NonlinearEmitterSpec {
        base: EmitterSpec { cell: MOMENT_ORDER as i64 + 2, ..emitter.base },
        ..*emitter
    };
    let op = two_excitation_build(params, &local, 2 * MOMENT_ORDER + 6, Boundary::Periodic, sheet)?;
    // Centred on the pair energy so the moments stay small for large U.
    let center = Complex64::new(2.0 * emitter.base.delta + emitter.u, -(params.gamma_b + params.j2));
    let moments = lattice_moments(&op.matrix, 0, &[0], center, MOMENT_ORDER).remove(0);
    Ok(MomentReference { center, moments })
}

/// `Π̄(τ) = i ∫ dω'/2π G(ω_d + ω') G(ω_d - ω') e^{-iω'τ}` on the real line.
fn pi_bar(params: &BathParams, emitter: &NonlinearEmitterSpec, taus: &[f64]) -> Result<Vec<Complex64>> {
    let base = &emitter.base;
    let sheet = Sheet::Second;
    let wd = emitter.drive_omega;
    let (_, clearance) = line_height(params, base, Complex64::new(2.0 * wd, 0.0), sheet)?;
    let green = SingleGreen::new(params, base, sheet);
    let h = spacing(clearance);
    let half = point_count(convolution_span(params, base), h)?;
    let point = |j: i64| Complex64::new(wd + h * j as f64, 0.0);
    let g: Vec<Complex64> = (-half..=half).map(|j| green.eval(point(j))).collect::<Result<_>>()?;
    let at = |j: i64| (j + half) as usize;
    // Integrand at ω' = j h, excluding the uncoupled product.
    let integrand: Vec<Complex64> = (-half..=half)
        .map(|j| {
            let plus = g[at(j)];
            let minus = g[at(-j)];
            let (ref_plus, ref_minus) = (green.reference(point(j)), green.reference(point(-j)));
            (plus - ref_plus) * minus + ref_plus * (minus - ref_minus)
        })
        .collect();
    let grid = LineGrid { eta: 0.0, x0: -h * half as f64, h, n: integrand.len() };
    let sums = line_transform(&grid, &integrand, taus);
    let dp = green.delta_prime;
    Ok(taus
        .iter()
        .zip(sums)
        .map(|(&tau, s)| {
            let uncoupled = (Complex64::new(0.0, -1.0) * (dp - wd) * tau).exp() / ((wd - dp) * 2.0);
            uncoupled + Complex64::new(0.0, 1.0) * s
        })
        .collect())
}

/// Steady-state `g2(τ)` at each delay, on the second sheet.
pub fn g2_series(params: &BathParams, emitter: &NonlinearEmitterSpec, taus: &[f64]) -> Result<Vec<f64>> {
    validate_grid(taus)?;
    let omega = Complex64::new(2.0 * emitter.drive_omega, 0.0);
    let pi = pi_function(params, &emitter.base, omega, Sheet::Second)?.pi;
    let t_matrix = emitter.u / (1.0 - pi * emitter.u);
    let bar = pi_bar(params, emitter, taus)?;
    Ok(taus
        .iter()
        .zip(bar)
        .map(|(&tau, b)| if tau == 0.0 { (1.0 - pi * emitter.u).inv().norm_sqr() } else { (1.0 + b * t_matrix).norm_sqr() })
        .collect())
}

pub fn g2(params: &BathParams, emitter: &NonlinearEmitterSpec, tau: f64) -> Result<f64> {
    Ok(g2_series(params, emitter, &[tau])?[0])
}
