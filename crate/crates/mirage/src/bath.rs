//! Bath parameters, band dispersions and phase bookkeeping.
//!
//! Three baths share one parameter set: the closed SSH chain (dissipation
//! ignored), the physical nonreciprocal chain with intra-cell hops
//! `j1 ± gamma_b/2` and uniform loss, and the mirage chain obtained by
//! analytic continuation, with reciprocal intra-cell hop
//! `sqrt(j1² - gamma_b²/4)` and the same uniform loss.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::self_energy::{poles_z, PoleKernel};
use crate::Complex64;

/// Relative distance (in units of `j2`) below which a point counts as sitting
/// on a phase boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Distance of a pole modulus from the unit circle below which a frequency is
/// treated as lying on a branch loop or cut.
pub const BRANCH_TOL: f64 = 1e-10;

/// Couplings and loss rate of the SSH bath, all in the same energy unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub j1: f64,
    pub j2: f64,
    pub gamma_b: f64,
}

impl BathParams {
    pub fn new(j1: f64, j2: f64, gamma_b: f64) -> Result<Self> {
        if !(j1.is_finite() && j2.is_finite() && gamma_b.is_finite()) {
            return Err(Error::InvalidParams("couplings must be finite"));
        }
        if j2 <= 0.0 {
            return Err(Error::InvalidParams("j2 must be positive"));
        }
        if j1 < 0.0 {
            return Err(Error::InvalidParams("j1 must be non-negative"));
        }
        if gamma_b < 0.0 {
            return Err(Error::InvalidParams("gamma_b must be non-negative"));
        }
        Ok(Self { j1, j2, gamma_b })
    }

    pub fn half_gamma(&self) -> f64 {
        0.5 * self.gamma_b
    }

    /// `j1² + j2² - gamma_b²/4`, the constant term of the pole quadratic.
    pub fn sigma1(&self) -> f64 {
        self.j1 * self.j1 + self.j2 * self.j2 - self.half_gamma() * self.half_gamma()
    }

    /// The same couplings with the loss switched off.
    pub fn closed(&self) -> Self {
        Self { gamma_b: 0.0, ..*self }
    }

    pub(crate) fn require_mirage(&self) -> Result<()> {
        if self.j1 <= self.half_gamma() {
            return Err(Error::MirageUndefined { j1: self.j1, half_gamma: self.half_gamma() });
        }
        Ok(())
    }
}

/// Parameters of the mirage chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirageParams {
    /// Reciprocal intra-cell hop `sqrt(j1² - gamma_b²/4)`.
    pub j1_tilde: f64,
    /// Radius of the deformed momentum contour, `sqrt((j1 - g/2)/(j1 + g/2))`.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BathVariant {
    Closed,
    Physical,
    Mirage,
}

/// Riemann sheet of the emitter Green function. The second sheet is the one
/// carried by the mirage bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    TopologicalLineGap,
    PointGap,
    TrivialLineGap,
    Topological,
    Trivial,
}

/// Outside (`I`) or inside (`II`) the branch loop of the physical bath,
/// decided by how many pole roots sit inside the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    I,
    II,
}

/// Values of `j1` at which gaps close for a given `j2` and `gamma_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBoundaries {
    pub physical_lower: f64,
    pub physical_upper: f64,
    pub mirage: f64,
}

/// Band energy at momentum `k`.
///
/// Closed bands are real; physical and mirage bands carry the loss in their
/// imaginary part. `Closed` ignores `gamma_b`.
pub fn dispersion(params: &BathParams, k: f64, band: Band, variant: BathVariant) -> Result<Complex64> {
    let sign = match band {
        Band::Upper => 1.0,
        Band::Lower => -1.0,
    };
    let (c, s) = (k.cos(), k.sin());
    let hg = params.half_gamma();
    let value = match variant {
        BathVariant::Closed => {
            let re = params.j1 + params.j2 * c;
            let im = params.j2 * s;
            Complex64::new(sign * (re * re + im * im).sqrt(), 0.0)
        }
        BathVariant::Physical => {
            let re = Complex64::new(params.j1 + params.j2 * c, 0.0);
            let im = Complex64::new(params.j2 * s, hg);
            Complex64::new(0.0, -hg) + (re * re + im * im).sqrt() * sign
        }
        BathVariant::Mirage => {
            let m = mirage_map(params)?;
            let re = m.j1_tilde + params.j2 * c;
            let im = params.j2 * s;
            Complex64::new(sign * (re * re + im * im).sqrt(), -hg)
        }
    };
    Ok(value)
}

fn check_boundary(params: &BathParams, boundary: f64) -> Result<()> {
    if (params.j1 - boundary).abs() < BOUNDARY_TOL * params.j2 {
        return Err(Error::OnPhaseBoundary { j1: params.j1, boundary });
    }
    Ok(())
}

/// Phase of the physical bath (three phases, including the point gap).
pub fn classify_phase(params: &BathParams) -> Result<PhaseLabel> {
    let b = gap_boundaries(params);
    check_boundary(params, b.physical_lower)?;
    check_boundary(params, b.physical_upper)?;
    Ok(if params.j1 < b.physical_lower {
        PhaseLabel::TopologicalLineGap
    } else if params.j1 < b.physical_upper {
        PhaseLabel::PointGap
    } else {
        PhaseLabel::TrivialLineGap
    })
}

/// Phase of the mirage bath, which only has line gaps.
pub fn classify_mirage_phase(params: &BathParams) -> Result<PhaseLabel> {
    params.require_mirage()?;
    let b = gap_boundaries(params);
    check_boundary(params, b.mirage)?;
    Ok(if params.j1 < b.mirage { PhaseLabel::Topological } else { PhaseLabel::Trivial })
}

pub fn mirage_map(params: &BathParams) -> Result<MirageParams> {
    params.require_mirage()?;
    let hg = params.half_gamma();
    let lo = params.j1 - hg;
    let hi = params.j1 + hg;
    Ok(MirageParams { j1_tilde: (lo * hi).sqrt(), r: (lo / hi).sqrt() })
}

/// Region of `omega` relative to the branch loop of the physical bath.
pub fn region_of(params: &BathParams, omega: Complex64) -> Result<Region> {
    let kernel = PoleKernel::physical(params);
    let poles = poles_z(&kernel, omega)?;
    poles.region()
}

pub fn gap_boundaries(params: &BathParams) -> GapBoundaries {
    let hg = params.half_gamma();
    GapBoundaries {
        physical_lower: params.j2 - hg,
        physical_upper: params.j2 + hg,
        mirage: (params.j2 * params.j2 + hg * hg).sqrt(),
    }
}
