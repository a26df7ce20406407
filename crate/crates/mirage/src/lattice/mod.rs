//! Finite-lattice effective Hamiltonians: brute-force ground truth for the
//! closed forms elsewhere in the crate.
//!
//! Single-excitation basis: emitters `0..N_a` first, then bath site `(s, j)`
//! at index `N_a + 2j + (0 for A, 1 for B)` for cells `j` in `0..n_b`.
//!
//! Two-excitation basis: unordered pairs `(i, j)`, `i <= j`, of single-excitation
//! modes in lexicographic order. The state `(i, j)` is `a_i† a_j† |0>` for
//! `i < j` and `(a_i†)² / sqrt(2) |0>` for `i = j`, which makes it normalized.

pub mod dump;
pub mod eigen;
pub mod integrate;
pub mod sparse;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{mirage_map, BathParams, Sheet};
use crate::bound_states::EmitterSpec;
use crate::error::{Error, Result};
use crate::multi_excitation::NonlinearEmitterSpec;
use crate::self_energy::{Site, Sublattice};
use crate::series::TimeSeries;
use crate::Complex64;

pub use integrate::StepControl;
pub use sparse::CsrMatrix;

/// Largest `n_b` accepted by the two-excitation builder.
pub const TWO_EXCITATION_MAX_CELLS: usize = 100;
/// Largest dimension accepted by `eigenmode_near`.
pub const EIGEN_MAX_DIMENSION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

/// How second-sheet emitter couplings are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingGauge {
    /// `Omega xi` into the bath, `Omega / xi` out of it.
    Rescaled,
    /// Plain `Omega` both ways; breaks equivalence with the physical bath.
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Emitter(usize),
    Bath(Site),
    /// Two excitations in single-excitation modes `i <= j`.
    Pair(usize, usize),
}

impl BasisLabel {
    pub fn name(&self) -> String {
        let sub = |s: Sublattice| if s == Sublattice::A { 'A' } else { 'B' };
        match self {
            BasisLabel::Emitter(m) => format!("a{m}"),
            BasisLabel::Bath(site) => format!("{}{}", sub(site.sublattice), site.cell),
            BasisLabel::Pair(i, j) => format!("p{i}_{j}"),
        }
    }
}

/// An immutable sparse operator together with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOperator {
    pub matrix: CsrMatrix,
    pub basis: Vec<BasisLabel>,
    pub boundary: Boundary,
    pub sheet: Sheet,
    pub n_b: usize,
    pub n_emitters: usize,
}

impl LatticeOperator {
    pub fn dimension(&self) -> usize {
        self.matrix.dim()
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.basis.iter().position(|l| *l == label)
    }

    /// Index of a bath site in the single-excitation basis (cells wrap modulo `n_b`).
    pub fn site_index(&self, site: Site) -> usize {
        single_site_index(self.n_emitters, self.n_b, site)
    }
}

fn single_site_index(n_emitters: usize, n_b: usize, site: Site) -> usize {
    let cell = site.cell.rem_euclid(n_b as i64) as usize;
    n_emitters + 2 * cell + if site.sublattice == Sublattice::A { 0 } else { 1 }
}

/// Amplitudes aligned with a `LatticeOperator` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dimension: usize) -> Self {
        Self { amplitudes: vec![Complex64::new(0.0, 0.0); dimension] }
    }

    /// Unit vector on one basis state.
    pub fn basis_state(dimension: usize, index: usize) -> Result<Self> {
        if index >= dimension {
            return Err(Error::DimensionMismatch { expected: dimension, got: index + 1 });
        }
        let mut s = Self::zeros(dimension);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn validate_cells(n_b: usize, emitters: &[EmitterSpec], boundary: Boundary) -> Result<()> {
    if n_b < 4 {
        return Err(Error::InvalidParams("n_b must be at least 4"));
    }
    if boundary == Boundary::Open && emitters.iter().any(|e| e.cell < 0 || e.cell >= n_b as i64) {
        return Err(Error::InvalidParams("emitter cell outside the open chain"));
    }
    Ok(())
}

fn single_triplets(
    params: &BathParams,
    emitters: &[EmitterSpec],
    n_b: usize,
    boundary: Boundary,
    sheet: Sheet,
    gauge: CouplingGauge,
) -> Result<Vec<(usize, usize, Complex64)>> {
    validate_cells(n_b, emitters, boundary)?;
    let hg = params.half_gamma();
    let (forward, backward, r) = match sheet {
        Sheet::First => (params.j1 + hg, params.j1 - hg, 1.0),
        Sheet::Second => {
            let m = mirage_map(params)?;
            (m.j1_tilde, m.j1_tilde, m.r)
        }
    };
    let n_a = emitters.len();
    let re = |x: f64| Complex64::new(x, 0.0);
    let a = |j: usize| n_a + 2 * j;
    let b = |j: usize| n_a + 2 * j + 1;
    let mut t = Vec::with_capacity(n_a * 3 + 6 * n_b);
    for j in 0..n_b {
        t.push((a(j), a(j), Complex64::new(0.0, -hg)));
        t.push((b(j), b(j), Complex64::new(0.0, -hg)));
        t.push((a(j), b(j), re(forward)));
        t.push((b(j), a(j), re(backward)));
        let next = if j + 1 < n_b {
            Some(j + 1)
        } else if boundary == Boundary::Periodic {
            Some(0)
        } else {
            None
        };
        if let Some(k) = next {
            t.push((b(j), a(k), re(params.j2)));
            t.push((a(k), b(j), re(params.j2)));
        }
    }
    for (m, e) in emitters.iter().enumerate() {
        t.push((m, m, e.delta_prime()));
        let site = single_site_index(n_a, n_b, e.site());
        let xi = match (sheet, gauge) {
            (Sheet::Second, CouplingGauge::Rescaled) => e.gauge(r),
            _ => 1.0,
        };
        t.push((site, m, re(e.omega_rabi * xi)));
        t.push((m, site, re(e.omega_rabi / xi)));
    }
    Ok(t)
}

fn single_basis(n_emitters: usize, n_b: usize) -> Vec<BasisLabel> {
    let mut basis: Vec<BasisLabel> = (0..n_emitters).map(BasisLabel::Emitter).collect();
    for j in 0..n_b as i64 {
        basis.push(BasisLabel::Bath(Site::new(Sublattice::A, j)));
        basis.push(BasisLabel::Bath(Site::new(Sublattice::B, j)));
    }
    basis
}

/// Single-excitation effective Hamiltonian with rescaled second-sheet couplings.
pub fn build_heff(params: &BathParams, emitters: &[EmitterSpec], n_b: usize, boundary: Boundary, sheet: Sheet) -> Result<LatticeOperator> {
    build_heff_with(params, emitters, n_b, boundary, sheet, CouplingGauge::Rescaled)
}

pub fn build_heff_with(
    params: &BathParams,
    emitters: &[EmitterSpec],
    n_b: usize,
    boundary: Boundary,
    sheet: Sheet,
    gauge: CouplingGauge,
) -> Result<LatticeOperator> {
    let triplets = single_triplets(params, emitters, n_b, boundary, sheet, gauge)?;
    let dim = emitters.len() + 2 * n_b;
    Ok(LatticeOperator {
        matrix: CsrMatrix::from_triplets(dim, triplets)?,
        basis: single_basis(emitters.len(), n_b),
        boundary,
        sheet,
        n_b,
        n_emitters: emitters.len(),
    })
}

/// Number of unordered pairs of `modes` single-excitation modes.
pub fn two_excitation_dimension(modes: usize) -> usize {
    modes * (modes + 1) / 2
}

/// Position of the pair `(i, j)` in lexicographic order; the arguments may
/// come in either order.
pub fn pair_index(i: usize, j: usize, modes: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // Row `i` starts after sum_{k<i} (modes - k) pairs.
    i * modes - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Bosonic two-excitation block of one Kerr emitter coupled to the bath.
pub fn two_excitation_build(params: &BathParams, emitter: &NonlinearEmitterSpec, n_b: usize, boundary: Boundary, sheet: Sheet) -> Result<LatticeOperator> {
    if n_b > TWO_EXCITATION_MAX_CELLS {
        return Err(Error::DimensionTooLarge { dimension: two_excitation_dimension(1 + 2 * n_b), limit: two_excitation_dimension(1 + 2 * TWO_EXCITATION_MAX_CELLS) });
    }
    let single = build_heff(params, core::slice::from_ref(&emitter.base), n_b, boundary, sheet)?;
    let modes = single.dimension();
    let mut columns: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); modes];
    for (r, c, v) in single.matrix.triplets() {
        columns[c].push((r, v));
    }
    let sqrt2 = core::f64::consts::SQRT_2;
    let mut triplets = Vec::new();
    let mut basis = Vec::with_capacity(two_excitation_dimension(modes));
    for i in 0..modes {
        for j in i..modes {
            basis.push(BasisLabel::Pair(i, j));
            let col = pair_index(i, j, modes);
            if i == j {
                for &(a, v) in &columns[i] {
                    if a == i {
                        triplets.push((col, col, v * 2.0));
                    } else {
                        triplets.push((pair_index(a, i, modes), col, v * sqrt2));
                    }
                }
            } else {
                for &(a, v) in &columns[i] {
                    let factor = if a == j { sqrt2 } else { 1.0 };
                    triplets.push((pair_index(a, j, modes), col, v * factor));
                }
                for &(a, v) in &columns[j] {
                    let factor = if a == i { sqrt2 } else { 1.0 };
                    triplets.push((pair_index(i, a, modes), col, v * factor));
                }
            }
        }
    }
    // Emitter is mode 0; its double occupation costs U.
    triplets.push((0, 0, Complex64::new(emitter.u, 0.0)));
    Ok(LatticeOperator {
        matrix: CsrMatrix::from_triplets(basis.len(), triplets)?,
        basis,
        boundary,
        sheet,
        n_b,
        n_emitters: 1,
    })
}

/// Integrates `dpsi/dt = -i H psi` and hands every grid state to `observe`.
pub fn evolve_with<F>(op: &LatticeOperator, psi0: &StateVector, t_grid: &[f64], observe: F) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    integrate::integrate(&op.matrix, &psi0.amplitudes, t_grid, StepControl::default(), observe)
}

/// Amplitudes of the listed basis states along the evolution.
pub fn evolve_state(op: &LatticeOperator, psi0: &StateVector, t_grid: &[f64], observe: &[BasisLabel]) -> Result<TimeSeries> {
    let indices: Vec<usize> = observe
        .iter()
        .map(|l| op.index_of(*l).ok_or(Error::InvalidParams("observed label not in basis")))
        .collect::<Result<_>>()?;
    let mut values = vec![Vec::with_capacity(t_grid.len()); indices.len()];
    evolve_with(op, psi0, t_grid, |_, _, state| {
        for (k, &i) in indices.iter().enumerate() {
            values[k].push(state[i]);
        }
    })?;
    let mut series = TimeSeries::new(t_grid.to_vec());
    for (label, v) in observe.iter().zip(values) {
        series.push(label.name(), v)?;
    }
    Ok(series)
}

/// Eigenpair nearest `sigma` with residual below `1e-10`; unit-norm vector.
pub fn eigenmode_near(op: &LatticeOperator, sigma: Complex64) -> Result<(Complex64, StateVector)> {
    if op.dimension() > EIGEN_MAX_DIMENSION {
        return Err(Error::DimensionTooLarge { dimension: op.dimension(), limit: EIGEN_MAX_DIMENSION });
    }
    let (lambda, v) = eigen::eigenpair_near(&op.matrix, sigma, 1e-10, 500)?;
    Ok((lambda, StateVector { amplitudes: v }))
}
