//! Closed-form self-energies from the residue theorem, a Brillouin-zone
//! quadrature oracle, and midgap single-pole interaction strengths.
//!
//! Every bath in this crate has a Bloch Hamiltonian of the form
//!
//! ```text
//! H(k) = -i g/2 + [[0, p + q e^{-ik}], [p' + q e^{ik}, 0]]
//! ```
//!
//! with `(p, p')` equal to `(j1, j1)` for the closed chain, `(j1 + g/2, j1 - g/2)`
//! for the physical chain and `(j1~, j1~)` for the mirage chain. With
//! `z = e^{ik}` and `w = omega + i g/2`, every resolvent element is a contour
//! integral over `|z| = 1` of a rational function whose poles are the two
//! roots of `-q p z² + (w² - p p' - q²) z - q p' = 0`.
//!
//! Cell-offset conventions follow the usual two-emitter layout:
//!
//! * `AB`: `<A,0| G |B,d>`
//! * `BA`: `<B,d| G |A,0>`
//! * `AA`, `BB`: `<s,d| G |s,0>`
//!
//! On the second sheet each element carries the gauge factor
//! `xi_row^{-1} xi_col` of the rescaled emitter couplings, with
//! `xi_A(j) = r^{-j}` and `xi_B(j) = r^{-j-1}`. With that factor the
//! second-sheet value coincides with the first-sheet one throughout region I.

#[allow(unused_imports)]
use num_traits::Float;

use crate::bath::{mirage_map, BathParams, BathVariant, Region, Sheet, BOUNDARY_TOL, BRANCH_TOL};
use crate::error::{Error, Result};
use crate::Complex64;

/// Sublattice of a bath site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sublattice {
    A,
    B,
}

/// A bath site: sublattice and unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Site {
    pub sublattice: Sublattice,
    pub cell: i64,
}

impl Site {
    pub fn new(sublattice: Sublattice, cell: i64) -> Self {
        Self { sublattice, cell }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SublatticePair {
    AB,
    BA,
    AA,
    BB,
}

/// The two roots of the pole quadratic in `z = e^{ik}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePair {
    pub z_plus: Complex64,
    pub z_minus: Complex64,
}

impl PolePair {
    pub fn product(&self) -> Complex64 {
        self.z_plus * self.z_minus
    }

    /// Region I when exactly one root lies inside the unit circle.
    pub fn region(&self) -> Result<Region> {
        let a = inside_unit_circle(self.z_plus)?;
        let b = inside_unit_circle(self.z_minus)?;
        Ok(if a != b { Region::I } else { Region::II })
    }
}

/// A self-energy value together with where it was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergyValue {
    pub value: Complex64,
    /// Region with respect to the physical branch loop; `None` when the
    /// frequency sits on that loop (possible on the second sheet only).
    pub region: Option<Region>,
    pub sheet: Sheet,
}

/// Coefficients `(p, p', q, g/2)` of a two-band chain, see the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleKernel {
    /// Amplitude of the `A <- B` intra-cell hop.
    pub forward: f64,
    /// Amplitude of the `B <- A` intra-cell hop.
    pub backward: f64,
    pub inter: f64,
    pub half_gamma: f64,
}

impl PoleKernel {
    pub fn closed(params: &BathParams) -> Self {
        Self { forward: params.j1, backward: params.j1, inter: params.j2, half_gamma: 0.0 }
    }

    pub fn physical(params: &BathParams) -> Self {
        let hg = params.half_gamma();
        Self { forward: params.j1 + hg, backward: params.j1 - hg, inter: params.j2, half_gamma: hg }
    }

    pub fn mirage(params: &BathParams) -> Result<Self> {
        let m = mirage_map(params)?;
        Ok(Self { forward: m.j1_tilde, backward: m.j1_tilde, inter: params.j2, half_gamma: params.half_gamma() })
    }

    pub fn for_variant(params: &BathParams, variant: BathVariant) -> Result<Self> {
        match variant {
            BathVariant::Closed => Ok(Self::closed(params)),
            BathVariant::Physical => Ok(Self::physical(params)),
            BathVariant::Mirage => Self::mirage(params),
        }
    }

    pub fn for_sheet(params: &BathParams, sheet: Sheet) -> Result<Self> {
        match sheet {
            Sheet::First => Ok(Self::physical(params)),
            Sheet::Second => Self::mirage(params),
        }
    }

    /// `omega + i g/2`.
    pub fn shifted(&self, omega: Complex64) -> Complex64 {
        omega + Complex64::new(0.0, self.half_gamma)
    }

    /// Off-diagonal Bloch entries `(H_AB(k), H_BA(k))`.
    pub fn bloch(&self, k: f64) -> (Complex64, Complex64) {
        let e = Complex64::new(k.cos(), k.sin());
        (self.forward + e.conj() * self.inter, self.backward + e * self.inter)
    }

    /// Both band energies at momentum `k`.
    pub fn bands(&self, k: f64) -> (Complex64, Complex64) {
        let (hab, hba) = self.bloch(k);
        let root = (hab * hba).sqrt();
        let shift = Complex64::new(0.0, -self.half_gamma);
        (shift + root, shift - root)
    }

    fn discriminant(&self, w: Complex64) -> Complex64 {
        let sigma = self.forward * self.backward + self.inter * self.inter;
        let b = w * w - sigma;
        (b * b - 4.0 * self.inter * self.inter * self.forward * self.backward).sqrt()
    }

    /// Roots, discriminant and shifted frequency at `omega`.
    fn solve(&self, omega: Complex64) -> Result<(PolePair, Complex64, Complex64)> {
        let a = -self.inter * self.forward;
        if a == 0.0 {
            return Err(Error::DegenerateQuadratic);
        }
        let w = self.shifted(omega);
        let sigma = self.forward * self.backward + self.inter * self.inter;
        let minus_b = sigma - w * w;
        let lambda = self.discriminant(w);
        let c_over_a = self.backward / self.forward;
        // Take the larger root from the non-cancelling sign, the other from the product.
        let plus = minus_b + lambda;
        let minus = minus_b - lambda;
        let (z_plus, z_minus) = if plus.norm() >= minus.norm() {
            let zp = plus / (2.0 * a);
            let zm = if zp == Complex64::new(0.0, 0.0) { zp } else { c_over_a / zp };
            (zp, zm)
        } else {
            let zm = minus / (2.0 * a);
            (c_over_a / zm, zm)
        };
        Ok((PolePair { z_plus, z_minus }, lambda, w))
    }

    /// Bath resolvent element for one of the four sublattice pairs at cell
    /// offset `d`, in the conventions of the module docs.
    pub fn element(&self, omega: Complex64, pair: SublatticePair, d: i64) -> Result<Complex64> {
        let (poles, lambda, w) = self.solve(omega)?;
        let (zp, zm) = (poles.z_plus, poles.z_minus);
        let in_p = inside_unit_circle(zp)?;
        let in_m = inside_unit_circle(zm)?;
        if in_p == in_m && d == 0 && matches!(pair, SublatticePair::AA | SublatticePair::BB) {
            // Both roots on one side: the on-site integrand has no net residue.
            return Ok(Complex64::new(0.0, 0.0));
        }
        if lambda.norm() < BRANCH_TOL * self.inter * self.inter {
            return Err(Error::OnBranchLoop { distance: 0.0 });
        }
        let dd = d as i32;
        let zero = Complex64::new(0.0, 0.0);
        // `term(cond, f)` evaluates `f` only when the root contributes.
        let term = |cond: bool, f: &dyn Fn() -> Complex64| if cond { f() } else { zero };
        let (p, pp, q) = (self.forward, self.backward, self.inter);
        let numerator = match pair {
            SublatticePair::AA | SublatticePair::BB => {
                let diff = if d >= 0 {
                    term(in_p, &|| zp.powi(dd)) - term(in_m, &|| zm.powi(dd))
                } else {
                    term(!in_m, &|| zm.powi(dd)) - term(!in_p, &|| zp.powi(dd))
                };
                diff * w
            }
            SublatticePair::AB => {
                let f = |y: Complex64| (p + y * q) * y.powi(dd);
                if d >= 0 {
                    term(!in_m, &|| f(zm.inv())) - term(!in_p, &|| f(zp.inv()))
                } else {
                    term(in_p, &|| f(zp.inv())) - term(in_m, &|| f(zm.inv()))
                }
            }
            SublatticePair::BA => {
                let g = |z: Complex64| (pp + z * q) * z.powi(dd);
                if d >= 0 {
                    term(in_p, &|| g(zp)) - term(in_m, &|| g(zm))
                } else {
                    term(!in_m, &|| g(zm)) - term(!in_p, &|| g(zp))
                }
            }
        };
        Ok(numerator / lambda)
    }

    /// Trapezoid-rule Brillouin-zone integral of the same element.
    pub fn element_quadrature(&self, omega: Complex64, pair: SublatticePair, d: i64, n_k: usize) -> Result<Complex64> {
        if n_k < 16 {
            return Err(Error::InvalidParams("n_k must be at least 16"));
        }
        let w = self.shifted(omega);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut nearest = f64::INFINITY;
        let df = d as f64;
        for n in 0..n_k {
            let k = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * n as f64 / n_k as f64;
            let (hab, hba) = self.bloch(k);
            let (up, lo) = self.bands(k);
            nearest = nearest.min((omega - up).norm()).min((omega - lo).norm());
            let denom = w * w - hab * hba;
            let phase = |s: f64| Complex64::new((s * df * k).cos(), (s * df * k).sin());
            let num = match pair {
                SublatticePair::AB => hab * phase(-1.0),
                SublatticePair::BA => hba * phase(1.0),
                SublatticePair::AA | SublatticePair::BB => w * phase(1.0),
            };
            sum += num / denom;
        }
        if nearest < QUADRATURE_TOL {
            return Err(Error::NearSpectrum { distance: nearest });
        }
        Ok(sum / n_k as f64)
    }
}

/// Closest approach to the band structure tolerated by the quadrature oracle.
pub const QUADRATURE_TOL: f64 = 1e-9;

pub(crate) fn inside_unit_circle(z: Complex64) -> Result<bool> {
    let m = z.norm();
    let distance = (m - 1.0).abs();
    if distance < BRANCH_TOL || !m.is_finite() {
        return Err(Error::OnBranchLoop { distance });
    }
    Ok(m < 1.0)
}

/// Gauge factor `xi_row^{-1} xi_col` of the second-sheet emitter couplings.
pub fn gauge_factor(r: f64, row: Site, col: Site) -> f64 {
    let exponent = |s: Site| match s.sublattice {
        Sublattice::A => s.cell,
        Sublattice::B => s.cell + 1,
    };
    // xi = r^{-e}, so xi_row^{-1} xi_col = r^{e_row - e_col}.
    r.powi((exponent(row) - exponent(col)) as i32)
}

pub(crate) fn pair_and_offset(row: Site, col: Site) -> (SublatticePair, i64) {
    match (row.sublattice, col.sublattice) {
        (Sublattice::A, Sublattice::A) => (SublatticePair::AA, row.cell - col.cell),
        (Sublattice::B, Sublattice::B) => (SublatticePair::BB, row.cell - col.cell),
        (Sublattice::A, Sublattice::B) => (SublatticePair::AB, col.cell - row.cell),
        (Sublattice::B, Sublattice::A) => (SublatticePair::BA, row.cell - col.cell),
    }
}

fn pair_sites(pair: SublatticePair, d: i64) -> (Site, Site) {
    use Sublattice::{A, B};
    match pair {
        SublatticePair::AB => (Site::new(A, 0), Site::new(B, d)),
        SublatticePair::BA => (Site::new(B, d), Site::new(A, 0)),
        SublatticePair::AA => (Site::new(A, d), Site::new(A, 0)),
        SublatticePair::BB => (Site::new(B, d), Site::new(B, 0)),
    }
}

/// `<row| (omega - H_bath)^{-1} |col>` on the requested sheet. The second
/// sheet includes the coupling gauge factor.
pub fn bath_resolvent(params: &BathParams, omega: Complex64, row: Site, col: Site, sheet: Sheet) -> Result<Complex64> {
    let (pair, d) = pair_and_offset(row, col);
    let kernel = PoleKernel::for_sheet(params, sheet)?;
    let value = kernel.element(omega, pair, d)?;
    Ok(match sheet {
        Sheet::First => value,
        Sheet::Second => value * gauge_factor(mirage_map(params)?.r, row, col),
    })
}

pub fn poles_z(kernel: &PoleKernel, omega: Complex64) -> Result<PolePair> {
    kernel.solve(omega).map(|(p, _, _)| p)
}

/// Roots of the pole quadratic for a bath variant.
pub fn poles_for(params: &BathParams, omega: Complex64, variant: BathVariant) -> Result<PolePair> {
    poles_z(&PoleKernel::for_variant(params, variant)?, omega)
}

/// Principal-branch discriminant of the pole quadratic. Physical and mirage
/// variants share the same expression.
pub fn discriminant(params: &BathParams, omega: Complex64, variant: BathVariant) -> Result<Complex64> {
    let kernel = match variant {
        BathVariant::Closed => PoleKernel::closed(params),
        _ => PoleKernel::physical(params),
    };
    Ok(kernel.discriminant(kernel.shifted(omega)))
}

fn physical_region(params: &BathParams, omega: Complex64) -> Option<Region> {
    poles_z(&PoleKernel::physical(params), omega).and_then(|p| p.region()).ok()
}

/// On-site self-energy of an emitter with coupling `omega_rabi`.
pub fn sigma_onsite(params: &BathParams, omega_rabi: f64, omega: Complex64, sheet: Sheet) -> Result<SelfEnergyValue> {
    sigma_cross(params, omega_rabi, omega, 0, SublatticePair::AA, sheet)
}

/// Cross self-energy between emitters on the sites of `pair` separated by `d` cells.
pub fn sigma_cross(
    params: &BathParams,
    omega_rabi: f64,
    omega: Complex64,
    d: i64,
    pair: SublatticePair,
    sheet: Sheet,
) -> Result<SelfEnergyValue> {
    let (row, col) = pair_sites(pair, d);
    let region = match sheet {
        Sheet::First => Some(poles_z(&PoleKernel::physical(params), omega)?.region()?),
        Sheet::Second => physical_region(params, omega),
    };
    let value = bath_resolvent(params, omega, row, col, sheet)? * (omega_rabi * omega_rabi);
    Ok(SelfEnergyValue { value, region, sheet })
}

/// Brillouin-zone quadrature of the defining integral. The mirage variant
/// includes the same gauge factor as the second-sheet closed form.
pub fn sigma_quadrature_oracle(
    params: &BathParams,
    omega_rabi: f64,
    omega: Complex64,
    d: i64,
    pair: SublatticePair,
    variant: BathVariant,
    n_k: usize,
) -> Result<Complex64> {
    let kernel = PoleKernel::for_variant(params, variant)?;
    let raw = kernel.element_quadrature(omega, pair, d, n_k)?;
    let gauge = match variant {
        BathVariant::Mirage => {
            let (row, col) = pair_sites(pair, d);
            gauge_factor(mirage_map(params)?.r, row, col)
        }
        _ => 1.0,
    };
    Ok(raw * (gauge * omega_rabi * omega_rabi))
}

/// Interaction strength in the single-pole approximation at the midgap
/// bound-state energy `-i gamma_b/2`.
pub fn interaction_single_pole(
    params: &BathParams,
    omega_rabi: f64,
    delta_prime: Complex64,
    d: i64,
    pair: SublatticePair,
    sheet: Sheet,
) -> Result<Complex64> {
    let hg = params.half_gamma();
    if (delta_prime - Complex64::new(0.0, -hg)).norm() > 1e-12 * params.j2 {
        return Err(Error::NotMidgap);
    }
    let j2 = params.j2;
    let o2 = omega_rabi * omega_rabi;
    // Effective hop entering the formula and the quantity compared with j2.
    let (hop, threshold, boundary) = match (sheet, pair) {
        (_, SublatticePair::AA | SublatticePair::BB) => return Ok(Complex64::new(0.0, 0.0)),
        (Sheet::First, SublatticePair::AB) => (params.j1 - hg, params.j1 - hg, j2 + hg),
        (Sheet::First, SublatticePair::BA) => (params.j1 + hg, params.j1 + hg, j2 - hg),
        (Sheet::Second, p) => {
            let m = mirage_map(params)?;
            let hop = if p == SublatticePair::AB { params.j1 - hg } else { params.j1 + hg };
            (hop, m.j1_tilde, (j2 * j2 + hg * hg).sqrt())
        }
    };
    if (threshold - j2).abs() < BOUNDARY_TOL * j2 {
        return Err(Error::OnPhaseBoundary { j1: params.j1, boundary });
    }
    let value = if threshold > j2 {
        if d >= 0 {
            -o2 / hop * (-j2 / hop).powi(d as i32)
        } else {
            0.0
        }
    } else if d < 0 {
        o2 / hop * (-hop / j2).powi(d.unsigned_abs() as i32)
    } else {
        0.0
    };
    Ok(Complex64::new(value, 0.0))
}
