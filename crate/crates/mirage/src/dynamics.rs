//! Real-time emitter dynamics from a line-contour Fourier transform of the
//! emitter Green matrix.
//!
//! Values follow the retarded convention
//! `G_mn(t) = ∫ dω/2π e^{-iωt} G_mn(ω) = -i <0| a_m(t) a_n†(0) |0>`, so the
//! diagonal starts at `-i`. Populations are `|G_mn(t)|²`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{mirage_map, BathParams, Sheet};
use crate::bound_states::EmitterSpec;
use crate::contour::{lattice_moments, line_transform, require_clearance, LineGrid, MomentReference};
use crate::error::{Error, Result};
use crate::lattice::{build_heff, BasisLabel, Boundary};
use crate::self_energy::{bath_resolvent, gauge_factor, Site};
use crate::series::{validate_grid, TimeSeries};
use crate::Complex64;

/// Height of the default contour above the top singularity.
pub const CONTOUR_MARGIN: f64 = 0.05;
pub const DEFAULT_N_OMEGA: usize = 1 << 16;
/// Largest emitter count handled by dense inversion.
pub const MAX_DENSE_EMITTERS: usize = 64;
/// Moments subtracted before the numerical transform.
pub(crate) const MOMENT_ORDER: usize = 8;

/// Green matrix `(ω - diag(Δ') - Σ(ω))^{-1}` of a set of emitters.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    pub omega: Complex64,
    pub sheet: Sheet,
    pub matrix: DMatrix<Complex64>,
}

/// Horizontal integration line `Im ω = eta`, sampled at `n_omega` points on
/// `[-span, span)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub eta: f64,
    pub span: f64,
    pub n_omega: usize,
}

impl ContourSpec {
    pub fn new(eta: f64, span: f64, n_omega: usize) -> Result<Self> {
        if !eta.is_finite() || !(span.is_finite() && span > 0.0) {
            return Err(Error::InvalidParams("contour offset and span must be finite, span positive"));
        }
        if !n_omega.is_power_of_two() || n_omega < 64 {
            return Err(Error::InvalidParams("n_omega must be a power of two >= 64"));
        }
        Ok(Self { eta, span, n_omega })
    }

    /// Default line for a set of emitters on one sheet.
    pub fn default_for(params: &BathParams, emitters: &[EmitterSpec], sheet: Sheet) -> Result<Self> {
        let top = singularity_ceiling(params, emitters, sheet)?;
        let detuning = emitters.iter().map(|e| e.delta.abs()).fold(0.0, f64::max);
        Ok(Self {
            eta: top + CONTOUR_MARGIN,
            span: 8.0 * (params.j1 + params.j2 + params.gamma_b + detuning),
            n_omega: DEFAULT_N_OMEGA,
        })
    }

    /// Twice the span at half the spacing.
    pub fn refined(&self) -> Self {
        Self { eta: self.eta, span: 2.0 * self.span, n_omega: 4 * self.n_omega }
    }

    pub(crate) fn grid(&self) -> LineGrid {
        LineGrid::symmetric(self.eta, self.span, self.n_omega)
    }
}

/// Upper bound on the imaginary part of every pole and branch point of the
/// emitter Green matrix on `sheet`.
///
/// The first-sheet bound is the contraction property. On the second sheet the
/// rescaled operator is similar to one whose loss part is
/// `diag(-gamma_a/2, ..., -gamma_b/2)`.
pub fn singularity_ceiling(params: &BathParams, emitters: &[EmitterSpec], sheet: Sheet) -> Result<f64> {
    match sheet {
        Sheet::First => Ok(0.0),
        Sheet::Second => {
            mirage_map(params)?;
            let loss = emitters.iter().map(|e| e.gamma_a).fold(params.gamma_b, f64::min);
            Ok(-0.5 * loss)
        }
    }
}

fn check_emitters(emitters: &[EmitterSpec]) -> Result<()> {
    if emitters.is_empty() {
        return Err(Error::InvalidParams("at least one emitter is required"));
    }
    if emitters.len() > MAX_DENSE_EMITTERS {
        return Err(Error::DimensionTooLarge { dimension: emitters.len(), limit: MAX_DENSE_EMITTERS });
    }
    Ok(())
}

fn inverse_green(params: &BathParams, emitters: &[EmitterSpec], omega: Complex64, sheet: Sheet) -> Result<DMatrix<Complex64>> {
    let n = emitters.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, ei) in emitters.iter().enumerate() {
        for (j, ej) in emitters.iter().enumerate() {
            let sigma = bath_resolvent(params, omega, ei.site(), ej.site(), sheet)? * (ei.omega_rabi * ej.omega_rabi);
            m[(i, j)] = if i == j { omega - ei.delta_prime() - sigma } else { -sigma };
        }
    }
    Ok(m)
}

pub fn green_matrix(params: &BathParams, emitters: &[EmitterSpec], omega: Complex64, sheet: Sheet) -> Result<GreenMatrix> {
    check_emitters(emitters)?;
    let matrix = inverse_green(params, emitters, omega, sheet)?.try_inverse().ok_or(Error::SingularMatrix)?;
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(GreenMatrix { omega, sheet, matrix })
}

fn green_column(params: &BathParams, emitters: &[EmitterSpec], omega: Complex64, sheet: Sheet, initial: usize) -> Result<DVector<Complex64>> {
    let m = inverse_green(params, emitters, omega, sheet)?;
    let mut rhs = DVector::zeros(emitters.len());
    rhs[initial] = Complex64::new(1.0, 0.0);
    let col = m.lu().solve(&rhs).ok_or(Error::SingularMatrix)?;
    if col.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(col)
}

/// Center of the moment expansion, well below every singularity.
fn moment_center(params: &BathParams) -> Complex64 {
    Complex64::new(0.0, -(params.half_gamma() + params.j2))
}

/// Ring long enough that `MOMENT_ORDER` hops never wrap, with cells shifted to
/// start at `MOMENT_ORDER + 2`.
fn moment_ring(cells: impl Iterator<Item = i64> + Clone) -> (i64, usize) {
    let lo = cells.clone().min().unwrap_or(0);
    let hi = cells.max().unwrap_or(0);
    let shift = MOMENT_ORDER as i64 + 2 - lo;
    (shift, (hi - lo) as usize + 2 * MOMENT_ORDER + 6)
}

fn emitter_references(params: &BathParams, emitters: &[EmitterSpec], sheet: Sheet, initial: usize) -> Result<Vec<MomentReference>> {
    let (shift, n_b) = moment_ring(emitters.iter().map(|e| e.cell));
    let shifted: Vec<EmitterSpec> = emitters.iter().map(|e| EmitterSpec { cell: e.cell + shift, ..*e }).collect();
    let op = build_heff(params, &shifted, n_b, Boundary::Periodic, sheet)?;
    let rows: Vec<usize> = (0..emitters.len()).collect();
    // Centred on the starting level so detuned emitters keep small moments.
    let center = moment_center(params) + emitters[initial].delta;
    Ok(lattice_moments(&op.matrix, initial, &rows, center, MOMENT_ORDER)
        .into_iter()
        .map(|moments| MomentReference { center, moments })
        .collect())
}

/// Column `initial` of the time-domain Green matrix, one series per emitter
/// labelled `a{m}`.
pub fn evolve_emitters(
    params: &BathParams,
    emitters: &[EmitterSpec],
    t_grid: &[f64],
    sheet: Sheet,
    contour: &ContourSpec,
    initial: usize,
) -> Result<TimeSeries> {
    check_emitters(emitters)?;
    validate_grid(t_grid)?;
    if initial >= emitters.len() {
        return Err(Error::InvalidParams("initial emitter index out of range"));
    }
    require_clearance(contour.eta, singularity_ceiling(params, emitters, sheet)?)?;
    let references = emitter_references(params, emitters, sheet, initial)?;
    let grid = contour.grid();
    let mut samples = vec![Vec::with_capacity(grid.n); emitters.len()];
    for omega in grid.points() {
        let col = green_column(params, emitters, omega, sheet, initial)?;
        for (m, s) in samples.iter_mut().enumerate() {
            s.push(col[m] - references[m].eval(omega));
        }
    }
    let mut series = TimeSeries::new(t_grid.to_vec());
    for (m, s) in samples.iter().enumerate() {
        let values = line_transform(&grid, s, t_grid)
            .into_iter()
            .zip(t_grid)
            .map(|(v, &t)| v + references[m].transform(t))
            .collect();
        series.push(BasisLabel::Emitter(m).name(), values)?;
    }
    Ok(series)
}

/// Largest pointwise difference between two series with the same layout.
pub fn max_difference(a: &TimeSeries, b: &TimeSeries) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// `evolve_emitters` plus a refinement self-check: the transform is repeated
/// with twice the span at half the spacing and must agree within `tol`.
pub fn evolve_emitters_checked(
    params: &BathParams,
    emitters: &[EmitterSpec],
    t_grid: &[f64],
    sheet: Sheet,
    contour: &ContourSpec,
    initial: usize,
    tol: f64,
) -> Result<TimeSeries> {
    let coarse = evolve_emitters(params, emitters, t_grid, sheet, contour, initial)?;
    let fine = evolve_emitters(params, emitters, t_grid, sheet, &contour.refined(), initial)?;
    let change = max_difference(&coarse, &fine);
    if !(change <= tol) {
        return Err(Error::AliasingDetected { change });
    }
    Ok(fine)
}

/// Default contour for the emitterless bath propagator.
pub fn bath_contour(params: &BathParams, sheet: Sheet) -> Result<ContourSpec> {
    let top = match sheet {
        Sheet::First => 0.0,
        Sheet::Second => {
            mirage_map(params)?;
            -params.half_gamma()
        }
    };
    ContourSpec::new(top + CONTOUR_MARGIN, 8.0 * (params.j1 + params.j2 + params.gamma_b), DEFAULT_N_OMEGA)
}

/// `C(t) = -i <0| b_site(t) b_site2†(0) |0>` on a time grid.
pub fn bath_correlation_series(params: &BathParams, times: &[f64], site: Site, site2: Site, sheet: Sheet, contour: &ContourSpec) -> Result<Vec<Complex64>> {
    validate_grid(times)?;
    let top = match sheet {
        Sheet::First => 0.0,
        Sheet::Second => -mirage_map(params).map(|_| params.half_gamma())?,
    };
    require_clearance(contour.eta, top)?;
    let (shift, n_b) = moment_ring([site.cell, site2.cell].into_iter());
    let op = build_heff(params, &[], n_b, Boundary::Periodic, sheet)?;
    let at = |s: Site| op.site_index(Site::new(s.sublattice, s.cell + shift));
    let center = moment_center(params);
    let scale = match sheet {
        Sheet::First => 1.0,
        Sheet::Second => gauge_factor(mirage_map(params)?.r, site, site2),
    };
    let moments = lattice_moments(&op.matrix, at(site2), &[at(site)], center, MOMENT_ORDER).remove(0);
    let reference = MomentReference { center, moments: moments.into_iter().map(|m| m * scale).collect() };
    let grid = contour.grid();
    let samples: Vec<Complex64> = grid
        .points()
        .map(|omega| Ok(bath_resolvent(params, omega, site, site2, sheet)? - reference.eval(omega)))
        .collect::<Result<_>>()?;
    Ok(line_transform(&grid, &samples, times)
        .into_iter()
        .zip(times)
        .map(|(v, &t)| v + reference.transform(t))
        .collect())
}

/// Single-time bath propagator with the default contour.
pub fn bath_correlation(params: &BathParams, t: f64, site: Site, site2: Site, sheet: Sheet) -> Result<Complex64> {
    let contour = bath_contour(params, sheet)?;
    Ok(bath_correlation_series(params, &[t], site, site2, sheet, &contour)?[0])
}

/// Minimum prominence of an accepted peak, relative to the signal range.
const PEAK_PROMINENCE: f64 = 0.1;

/// Angular frequency of the renormalized signal `e^{gamma_b t} |value|²`
/// from the mean spacing of its interior maxima.
pub fn rabi_frequency_estimate(series: &TimeSeries, observable: &str, gamma_b: f64) -> Result<f64> {
    let values = series.get(observable).ok_or(Error::InvalidParams("observable not in series"))?;
    let signal: Vec<f64> = series.times.iter().zip(values).map(|(t, v)| (gamma_b * t).exp() * v.norm_sqr()).collect();
    let peaks = prominent_maxima(&signal);
    if peaks.len() < 2 {
        return Err(Error::NoOscillationDetected);
    }
    let first = series.times[peaks[0]];
    let last = series.times[*peaks.last().expect("non-empty")];
    let period = (last - first) / (peaks.len() - 1) as f64;
    Ok(2.0 * core::f64::consts::PI / period)
}

fn prominent_maxima(signal: &[f64]) -> Vec<usize> {
    let hi = signal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = signal.iter().copied().fold(f64::INFINITY, f64::min);
    let range = hi - lo;
    if !(range > 1e-9 * hi.abs().max(1e-300)) {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for i in 1..signal.len().saturating_sub(1) {
        if !(signal[i] > signal[i - 1] && signal[i] >= signal[i + 1]) {
            continue;
        }
        let left = signal[..i].iter().rev().take_while(|&&v| v <= signal[i]).copied().fold(signal[i], f64::min);
        let right = signal[i + 1..].iter().take_while(|&&v| v <= signal[i]).copied().fold(signal[i], f64::min);
        // Prominence over the deeper of the two valleys bounded by higher ground.
        let base = left.max(right);
        if signal[i] - base > PEAK_PROMINENCE * range {
            peaks.push(i);
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::self_energy::Sublattice;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
    }

    #[test]
    fn single_emitter_matrix_is_scalar_green_function() {
        let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
        let e = EmitterSpec::new(Sublattice::A, 0, 0.1, 0.05, 0.2).unwrap();
        let omega = c(0.3, 0.1);
        let g = green_matrix(&p, &[e], omega, Sheet::First).unwrap();
        let sigma = bath_resolvent(&p, omega, e.site(), e.site(), Sheet::First).unwrap() * 0.04;
        assert!((g.matrix[(0, 0)] - (omega - e.delta_prime() - sigma).inv()).norm() < 1e-14);
    }

    #[test]
    fn closed_bath_cross_terms_are_conjugate() {
        let p = BathParams::new(0.8, 1.0, 0.0).unwrap();
        let omega = c(0.1, 0.0);
        let a = Site::new(Sublattice::A, 0);
        let b = Site::new(Sublattice::B, 3);
        let ab = bath_resolvent(&p, omega, a, b, Sheet::First).unwrap();
        let ba = bath_resolvent(&p, omega, b, a, Sheet::First).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
        let lossy = BathParams::new(0.8, 1.0, 0.3).unwrap();
        let omega = c(0.2, 0.1);
        let ab = bath_resolvent(&lossy, omega, a, b, Sheet::First).unwrap();
        let ba = bath_resolvent(&lossy, omega, b, a, Sheet::First).unwrap();
        assert!((ab - ba.conj()).norm() > 1e-3);
    }

    #[test]
    fn decoupled_emitter_decays_freely() {
        let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
        let e = EmitterSpec::new(Sublattice::A, 0, 0.3, 0.1, 0.0).unwrap();
        let times = grid(40.0, 40);
        for sheet in [Sheet::First, Sheet::Second] {
            let contour = ContourSpec::default_for(&p, &[e], sheet).unwrap();
            let s = evolve_emitters(&p, &[e], &times, sheet, &contour, 0).unwrap();
            for (t, v) in times.iter().zip(s.get("a0").unwrap()) {
                assert!((v.norm() - (-0.05 * t).exp()).abs() < 1e-9, "{sheet:?} {t}: {}", v.norm());
            }
        }
    }

    #[test]
    fn equal_time_values() {
        let p = BathParams::new(1.1, 1.0, 0.05).unwrap();
        let es = [
            EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2).unwrap(),
            EmitterSpec::new(Sublattice::B, 2, 0.0, 0.05, 0.2).unwrap(),
        ];
        let contour = ContourSpec::default_for(&p, &es, Sheet::Second).unwrap();
        let s = evolve_emitters(&p, &es, &[0.0], Sheet::Second, &contour, 1).unwrap();
        assert!((s.get("a1").unwrap()[0] - c(0.0, -1.0)).norm() < 1e-8);
        assert!(s.get("a0").unwrap()[0].norm() < 1e-8);
    }

    #[test]
    fn low_contour_is_rejected() {
        let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
        let e = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2).unwrap();
        let bad = ContourSpec::new(-0.01, 10.0, 1024).unwrap();
        assert!(matches!(evolve_emitters(&p, &[e], &[0.0, 1.0], Sheet::First, &bad, 0), Err(Error::ContourTooLow { .. })));
        let ok = ContourSpec::new(-0.01, 10.0, 1024).unwrap();
        assert!(evolve_emitters(&p, &[e], &[0.0, 1.0], Sheet::Second, &ok, 0).is_ok());
    }

    #[test]
    fn coarse_contour_fails_self_check() {
        let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
        let e = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2).unwrap();
        let coarse = ContourSpec::new(0.05, 4.0, 64).unwrap();
        let r = evolve_emitters_checked(&p, &[e], &grid(50.0, 10), Sheet::First, &coarse, 0, 1e-6);
        assert!(matches!(r, Err(Error::AliasingDetected { .. })));
    }

    #[test]
    fn bath_correlation_at_zero() {
        let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
        let a = Site::new(Sublattice::A, 3);
        let b = Site::new(Sublattice::B, 4);
        for sheet in [Sheet::First, Sheet::Second] {
            assert!((bath_correlation(&p, 0.0, a, a, sheet).unwrap() - c(0.0, -1.0)).norm() < 1e-9);
            assert!(bath_correlation(&p, 0.0, a, b, sheet).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn synthetic_oscillation_frequency() {
        let f = 0.37;
        let times = grid(100.0, 2000);
        let mut s = TimeSeries::new(times.clone());
        let gamma = 0.05;
        s.push("x".into(), times.iter().map(|t| c((f * t / 2.0).cos() * (-gamma * t / 2.0).exp(), 0.0)).collect()).unwrap();
        let est = rabi_frequency_estimate(&s, "x", gamma).unwrap();
        assert!((est - f).abs() < 1e-3 * f, "{est}");
    }

    #[test]
    fn monotone_signal_has_no_oscillation() {
        let times = grid(10.0, 100);
        let mut s = TimeSeries::new(times.clone());
        s.push("x".into(), times.iter().map(|t| c((-0.1 * t).exp(), 0.0)).collect()).unwrap();
        assert_eq!(rabi_frequency_estimate(&s, "x", 0.0), Err(Error::NoOscillationDetected));
    }
}
