//! Bound states of a single emitter: energies from the pole equation and
//! photon profiles from the bath resolvent, plus the midgap closed forms and
//! the open-chain dark states.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{mirage_map, BathParams, Sheet, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::self_energy::{pair_and_offset, poles_z, sigma_onsite, PoleKernel, Site, Sublattice};
use crate::Complex64;

/// Largest tolerated photon mass outside a bound-state window.
pub const TAIL_TOL: f64 = 1e-12;

const NEWTON_STEP: f64 = 1e-6;
const NEWTON_MAX: usize = 100;
const ROOT_TOL: f64 = 1e-13;
const GRID_POINTS: usize = 41;

/// A two-level emitter coupled locally to one bath site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterSpec {
    pub sublattice: Sublattice,
    pub cell: i64,
    pub delta: f64,
    pub gamma_a: f64,
    pub omega_rabi: f64,
}

impl EmitterSpec {
    pub fn new(sublattice: Sublattice, cell: i64, delta: f64, gamma_a: f64, omega_rabi: f64) -> Result<Self> {
        if !(delta.is_finite() && gamma_a.is_finite() && omega_rabi.is_finite()) {
            return Err(Error::InvalidParams("emitter parameters must be finite"));
        }
        if gamma_a < 0.0 {
            return Err(Error::InvalidParams("gamma_a must be non-negative"));
        }
        if omega_rabi < 0.0 {
            return Err(Error::InvalidParams("omega_rabi must be non-negative"));
        }
        Ok(Self { sublattice, cell, delta, gamma_a, omega_rabi })
    }

    /// `delta - i gamma_a/2`.
    pub fn delta_prime(&self) -> Complex64 {
        Complex64::new(self.delta, -0.5 * self.gamma_a)
    }

    pub fn site(&self) -> Site {
        Site::new(self.sublattice, self.cell)
    }

    /// True when `delta' = -i gamma_b/2` to within rounding.
    pub fn is_midgap(&self, params: &BathParams) -> bool {
        (self.delta_prime() - Complex64::new(0.0, -params.half_gamma())).norm() <= 1e-12 * params.j2
    }

    /// Coupling gauge `xi` of the rescaled second-sheet couplings.
    pub fn gauge(&self, r: f64) -> f64 {
        let exponent = match self.sublattice {
            Sublattice::A => self.cell,
            Sublattice::B => self.cell + 1,
        };
        r.powi(-exponent as i32)
    }
}

/// Bound state `phi_a a† + sum f b†` over a finite window of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub omega_bs: Complex64,
    pub phi_a: Complex64,
    pub emitter: Site,
    pub window: RangeInclusive<i64>,
    pub f_a: Vec<Complex64>,
    pub f_b: Vec<Complex64>,
}

impl BoundState {
    fn zeroed(omega_bs: Complex64, emitter: Site, window: RangeInclusive<i64>) -> Self {
        let len = (window.end() - window.start() + 1).max(0) as usize;
        let zero = Complex64::new(0.0, 0.0);
        Self { omega_bs, phi_a: Complex64::new(1.0, 0.0), emitter, window, f_a: vec![zero; len], f_b: vec![zero; len] }
    }

    /// Photon amplitude on `site`; zero outside the window.
    pub fn amplitude(&self, site: Site) -> Complex64 {
        if !self.window.contains(&site.cell) {
            return Complex64::new(0.0, 0.0);
        }
        let i = (site.cell - self.window.start()) as usize;
        match site.sublattice {
            Sublattice::A => self.f_a[i],
            Sublattice::B => self.f_b[i],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.phi_a.norm_sqr() + self.f_a.iter().chain(&self.f_b).map(|f| f.norm_sqr()).sum::<f64>()
    }

    /// Rescales to unit Euclidean norm with a real positive emitter amplitude.
    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        let phase = if self.phi_a.norm() > 0.0 { self.phi_a.conj() / self.phi_a.norm() } else { Complex64::new(1.0, 0.0) };
        let factor = phase / norm;
        self.phi_a *= factor;
        self.f_a.iter_mut().chain(self.f_b.iter_mut()).for_each(|f| *f *= factor);
    }

    /// Photon-weighted mean cell offset from the emitter; positive for a
    /// cloud sitting to the right.
    pub fn photon_centroid(&self) -> f64 {
        let mut weight = 0.0;
        let mut moment = 0.0;
        for (i, cell) in self.window.clone().enumerate() {
            let w = self.f_a[i].norm_sqr() + self.f_b[i].norm_sqr();
            weight += w;
            moment += w * (cell - self.emitter.cell) as f64;
        }
        if weight == 0.0 {
            0.0
        } else {
            moment / weight
        }
    }

    /// Photon mass beyond the window estimated from the edge amplitudes and
    /// the geometric decay ratio, relative to the total norm.
    fn tail_estimate(&self, ratio: f64) -> f64 {
        let n = self.f_a.len();
        if n == 0 {
            return f64::INFINITY;
        }
        let edge = |i: usize| self.f_a[i].norm_sqr() + self.f_b[i].norm_sqr();
        let geometric = ratio * ratio / (1.0 - ratio * ratio);
        (edge(0) + edge(n - 1)) * geometric / self.norm_sqr()
    }
}

fn pole_residual(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet, omega: Complex64) -> Result<Complex64> {
    let sigma = sigma_onsite(params, emitter.omega_rabi, omega, sheet)?.value;
    Ok(omega - emitter.delta_prime() - sigma)
}

fn newton(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet, seed: Complex64) -> Result<Complex64> {
    let mut omega = seed;
    let mut residual = f64::INFINITY;
    let h = NEWTON_STEP * params.j2;
    for _ in 0..NEWTON_MAX {
        let f = pole_residual(params, emitter, sheet, omega)?;
        residual = f.norm();
        if residual < ROOT_TOL {
            return Ok(omega);
        }
        let fp = pole_residual(params, emitter, sheet, omega + h)?;
        let fm = pole_residual(params, emitter, sheet, omega - h)?;
        let derivative = (fp - fm) / (2.0 * h);
        if derivative.norm() == 0.0 {
            break;
        }
        let step = f / derivative;
        omega -= step;
        if step.norm() < 1e-15 * omega.norm().max(params.j2) {
            let f = pole_residual(params, emitter, sheet, omega)?;
            if f.norm() < 1e-12 {
                return Ok(omega);
            }
            residual = f.norm();
            break;
        }
    }
    Err(Error::NoConvergence { iterations: NEWTON_MAX, residual })
}

fn scan_half_width(params: &BathParams, emitter: &EmitterSpec) -> f64 {
    0.5 * (params.j1 + params.j2) + params.gamma_b + 2.0 * emitter.omega_rabi
}

/// Local minima of `|pole residual|` on a square grid around `delta'`.
fn grid_minima(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet) -> Vec<Complex64> {
    let half = scan_half_width(params, emitter);
    let n = GRID_POINTS;
    let centre = emitter.delta_prime();
    let point = |i: usize, j: usize| {
        centre + Complex64::new(-half + 2.0 * half * i as f64 / (n - 1) as f64, -half + 2.0 * half * j as f64 / (n - 1) as f64)
    };
    let mut values = vec![f64::INFINITY; n * n];
    for i in 0..n {
        for j in 0..n {
            if let Ok(f) = pole_residual(params, emitter, sheet, point(i, j)) {
                values[i * n + j] = f.norm();
            }
        }
    }
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let v = values[i * n + j];
            if !v.is_finite() {
                continue;
            }
            let is_min = (-1i64..=1).all(|di| {
                (-1i64..=1).all(|dj| {
                    (di == 0 && dj == 0) || v <= values[((i as i64 + di) as usize) * n + (j as i64 + dj) as usize]
                })
            });
            if is_min {
                minima.push((v, point(i, j)));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    minima.into_iter().map(|(_, p)| p).collect()
}

fn check_off_spectrum(params: &BathParams, sheet: Sheet, omega: Complex64) -> Result<()> {
    let kernel = PoleKernel::for_sheet(params, sheet)?;
    let poles = poles_z(&kernel, omega).map_err(|_| Error::RootOnSpectrum)?;
    for z in [poles.z_plus, poles.z_minus] {
        if (z.norm() - 1.0).abs() < 1e-9 {
            return Err(Error::RootOnSpectrum);
        }
    }
    Ok(())
}

/// Root of `omega - delta' - Sigma(omega) = 0` nearest `delta'`.
pub fn bs_energy(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet) -> Result<Complex64> {
    if sheet == Sheet::Second {
        mirage_map(params)?;
    }
    if emitter.is_midgap(params) {
        return Ok(Complex64::new(0.0, -params.half_gamma()));
    }
    let seed = emitter.delta_prime();
    let first = newton(params, emitter, sheet, seed);
    let root = match first {
        Ok(root) => root,
        Err(first_error) => {
            let mut found = None;
            for candidate in grid_minima(params, emitter, sheet) {
                if let Ok(root) = newton(params, emitter, sheet, candidate) {
                    found = Some(root);
                    break;
                }
            }
            match found {
                Some(root) => root,
                None if matches!(first_error, Error::OnBranchLoop { .. }) => return Err(Error::RootOnSpectrum),
                None => return Err(first_error),
            }
        }
    };
    check_off_spectrum(params, sheet, root)?;
    Ok(root)
}

/// Every distinct root reachable from the grid scan, nearest to `delta'` first.
pub fn bs_energies(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet) -> Result<Vec<Complex64>> {
    if sheet == Sheet::Second {
        mirage_map(params)?;
    }
    let mut roots: Vec<Complex64> = Vec::new();
    let mut seeds = vec![emitter.delta_prime()];
    seeds.extend(grid_minima(params, emitter, sheet));
    for seed in seeds {
        let Ok(root) = newton(params, emitter, sheet, seed) else { continue };
        if check_off_spectrum(params, sheet, root).is_err() {
            continue;
        }
        if roots.iter().all(|r| (r - root).norm() > 1e-8) {
            roots.push(root);
        }
    }
    let centre = emitter.delta_prime();
    roots.sort_by(|a, b| (a - centre).norm().total_cmp(&(b - centre).norm()));
    Ok(roots)
}

/// Default window half-width: amplitudes fall by twelve decades.
pub fn default_half_width(ratio: f64) -> usize {
    if !(ratio > 0.0 && ratio < 1.0) {
        return if ratio <= 0.0 { 20 } else { 2000 };
    }
    let cells = (-12.0 / ratio.log10()).ceil();
    (cells as usize).clamp(20, 2000)
}

/// Slowest geometric decay ratio of resolvent elements at `omega`.
fn decay_ratio(params: &BathParams, sheet: Sheet, omega: Complex64) -> Result<f64> {
    let kernel = PoleKernel::for_sheet(params, sheet)?;
    let poles = poles_z(&kernel, omega)?;
    let ratio = |z: Complex64| {
        let m = z.norm();
        if m < 1.0 {
            m
        } else {
            1.0 / m
        }
    };
    Ok(ratio(poles.z_plus).max(ratio(poles.z_minus)))
}

/// Photon profile with `phi_a = 1` at a given energy over the given cells.
pub fn bs_profile(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet, omega_bs: Complex64, cells: RangeInclusive<i64>) -> Result<BoundState> {
    let kernel = PoleKernel::for_sheet(params, sheet)?;
    let coupling = match sheet {
        Sheet::First => emitter.omega_rabi,
        Sheet::Second => emitter.omega_rabi * emitter.gauge(mirage_map(params)?.r),
    };
    let mut state = BoundState::zeroed(omega_bs, emitter.site(), cells.clone());
    for (i, cell) in cells.enumerate() {
        for sublattice in [Sublattice::A, Sublattice::B] {
            let (pair, d) = pair_and_offset(Site::new(sublattice, cell), emitter.site());
            let value = kernel.element(omega_bs, pair, d)? * coupling;
            match sublattice {
                Sublattice::A => state.f_a[i] = value,
                Sublattice::B => state.f_b[i] = value,
            }
        }
    }
    Ok(state)
}

/// Normalized bound state. `half_width` defaults to the twelve-decade rule.
pub fn bs_wavefunction(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet, half_width: Option<usize>) -> Result<BoundState> {
    let omega_bs = bs_energy(params, emitter, sheet)?;
    let ratio = decay_ratio(params, sheet, omega_bs)?;
    let half = half_width.unwrap_or_else(|| default_half_width(ratio)) as i64;
    let cells = emitter.cell - half..=emitter.cell + half;
    let mut state = bs_profile(params, emitter, sheet, omega_bs, cells)?;
    let tail = state.tail_estimate(ratio);
    if tail > TAIL_TOL {
        return Err(Error::WindowTooSmall { half_width: half as usize, tail });
    }
    state.normalize();
    Ok(state)
}

/// Effective intra-cell hops `(A <- B, B <- A)` and the coupling gauge on a sheet.
fn midgap_hops(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet) -> Result<(f64, f64, f64)> {
    let hg = params.half_gamma();
    match sheet {
        Sheet::First => Ok((params.j1 + hg, params.j1 - hg, 1.0)),
        Sheet::Second => {
            let m = mirage_map(params)?;
            Ok((m.j1_tilde, m.j1_tilde, emitter.gauge(m.r)))
        }
    }
}

/// Piecewise geometric profile at `-i gamma_b/2`; `hop` is the intra-cell
/// hop adjacent to the emitter.
fn midgap_amplitude(hop: f64, j2: f64, coupling: f64, sublattice: Sublattice, offset: i64) -> f64 {
    let strong = hop > j2;
    match (sublattice, strong) {
        // Emitter on A populates B.
        (Sublattice::A, true) if offset >= 0 => -coupling / hop * (-j2 / hop).powi(offset as i32),
        (Sublattice::A, false) if offset < 0 => coupling / hop * (-hop / j2).powi(offset.unsigned_abs() as i32),
        // Emitter on B populates A.
        (Sublattice::B, true) if offset <= 0 => -coupling / hop * (-j2 / hop).powi(offset.unsigned_abs() as i32),
        (Sublattice::B, false) if offset > 0 => coupling / hop * (-hop / j2).powi(offset as i32),
        _ => 0.0,
    }
}

/// Closed-form midgap bound state, normalized over `cells` (default window
/// when `None`).
pub fn bs_midgap_closed_form(params: &BathParams, emitter: &EmitterSpec, sheet: Sheet, half_width: Option<usize>) -> Result<BoundState> {
    if !emitter.is_midgap(params) {
        return Err(Error::NotMidgap);
    }
    let (forward, backward, gauge) = midgap_hops(params, emitter, sheet)?;
    let hop = match emitter.sublattice {
        Sublattice::A => forward,
        Sublattice::B => backward,
    };
    if (hop - params.j2).abs() < BOUNDARY_TOL * params.j2 {
        return Err(Error::OnPhaseBoundary { j1: params.j1, boundary: params.j2 });
    }
    // Window sized from the slower of the two pole ratios, as in the general route.
    let ratio = [forward, backward].iter().map(|h| (h / params.j2).min(params.j2 / h)).fold(0.0, f64::max);
    let half = half_width.unwrap_or_else(|| default_half_width(ratio)) as i64;
    let cells = emitter.cell - half..=emitter.cell + half;
    let omega_bs = Complex64::new(0.0, -params.half_gamma());
    let mut state = BoundState::zeroed(omega_bs, emitter.site(), cells.clone());
    let coupling = emitter.omega_rabi * gauge;
    for (i, cell) in cells.enumerate() {
        let value = Complex64::new(midgap_amplitude(hop, params.j2, coupling, emitter.sublattice, cell - emitter.cell), 0.0);
        match emitter.sublattice {
            Sublattice::A => state.f_b[i] = value,
            Sublattice::B => state.f_a[i] = value,
        }
    }
    let tail = state.tail_estimate(ratio);
    if tail > TAIL_TOL {
        return Err(Error::WindowTooSmall { half_width: half as usize, tail });
    }
    state.normalize();
    Ok(state)
}

/// Dark state at `-i gamma_b/2` of a physical open chain of `n_b` cells
/// (cells `0..n_b`). The profile runs to the chain edge, so it is exact for
/// any emitter position and may grow towards the boundary.
pub fn obc_dark_state(params: &BathParams, emitter: &EmitterSpec, n_b: usize) -> Result<BoundState> {
    if !emitter.is_midgap(params) {
        return Err(Error::NotMidgap);
    }
    if emitter.cell < 0 || emitter.cell >= n_b as i64 {
        return Err(Error::InvalidParams("emitter cell outside the open chain"));
    }
    let hg = params.half_gamma();
    let cells = 0..=(n_b as i64 - 1);
    let mut state = BoundState::zeroed(Complex64::new(0.0, -hg), emitter.site(), cells.clone());
    let j2 = params.j2;
    for (i, cell) in cells.enumerate() {
        let offset = cell - emitter.cell;
        match emitter.sublattice {
            Sublattice::A if offset >= 0 => {
                let hop = params.j1 + hg;
                state.f_b[i] = Complex64::new(-emitter.omega_rabi / hop * (-j2 / hop).powi(offset as i32), 0.0);
            }
            Sublattice::B if offset <= 0 => {
                let hop = params.j1 - hg;
                if hop == 0.0 {
                    return Err(Error::InvalidParams("dark state undefined at j1 = gamma_b/2"));
                }
                let n = offset.unsigned_abs() as i32;
                let sign = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
                state.f_a[i] = Complex64::new(sign * emitter.omega_rabi / hop * (j2 / hop).powi(n), 0.0);
            }
            _ => {}
        }
    }
    state.normalize();
    Ok(state)
}
