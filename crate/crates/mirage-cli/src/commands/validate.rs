//! Built-in invariant checks on seeded random inputs.

use core::f64::consts::PI;

use mirage::bath::{dispersion, region_of};
use mirage::bound_states::bs_wavefunction;
use mirage::dynamics::evolve_emitters;
use mirage::lattice::{build_heff, eigenmode_near, evolve_state, evolve_with, two_excitation_build};
use mirage::multi_excitation::{g2, pair_emission_dynamics, PAIR_LABEL};
use mirage::self_energy::{poles_for, sigma_cross, sigma_onsite, sigma_quadrature_oracle};
use mirage::{
    Band, BasisLabel, BathParams, BathVariant, Boundary, Complex64, ContourSpec, EmitterSpec, NonlinearEmitterSpec, Region, Sheet,
    StateVector, Sublattice, SublatticePair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::Table;

type Check = fn(bool) -> Result<(bool, String), mirage::Error>;

const CHECKS: [(&str, Check); 9] = [
    ("self_energy_quadrature", quadrature),
    ("region_two_vanishes", region_two),
    ("sheets_agree_outside_loop", sheet_equality),
    ("physical_evolution_contracts", contraction),
    ("bound_state_on_lattice", bound_state),
    ("contour_matches_lattice", contour_vs_lattice),
    ("pair_dynamics_matches_lattice", pair_dynamics),
    ("g2_free_emitter_is_one", free_g2),
    ("mirage_ring_spectrum", ring_spectrum),
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn times(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn random_params(rng: &mut ChaCha8Rng) -> BathParams {
    BathParams::new(rng.gen_range(0.3..1.8), 1.0, rng.gen_range(0.0..0.4)).expect("valid range")
}

fn spectrum_distance(params: &BathParams, omega: Complex64, variant: BathVariant) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..1024 {
        let k = -PI + 2.0 * PI * i as f64 / 1024.0;
        for band in [Band::Upper, Band::Lower] {
            if let Ok(w) = dispersion(params, k, band, variant) {
                best = best.min((w - omega).norm());
            }
        }
    }
    best
}

fn quadrature(quick: bool) -> Result<(bool, String), mirage::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let target = if quick { 40 } else { 400 };
    let pairs = [SublatticePair::AA, SublatticePair::BB, SublatticePair::AB, SublatticePair::BA];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < target {
        let p = random_params(&mut rng);
        let variant = [BathVariant::Closed, BathVariant::Physical, BathVariant::Mirage][rng.gen_range(0..3)];
        let omega = c(rng.gen_range(-3.5..3.5), rng.gen_range(-0.8..0.4));
        if spectrum_distance(&p, omega, variant) < 0.1 {
            continue;
        }
        let (pair, d) = (pairs[rng.gen_range(0..4)], rng.gen_range(-4..=4));
        let closed = match variant {
            BathVariant::Closed => sigma_cross(&p.closed(), 0.2, omega, d, pair, Sheet::First),
            BathVariant::Physical => sigma_cross(&p, 0.2, omega, d, pair, Sheet::First),
            BathVariant::Mirage => sigma_cross(&p, 0.2, omega, d, pair, Sheet::Second),
        }?
        .value;
        let poles = poles_for(&p, omega, variant)?;
        let strip = poles.z_plus.norm().ln().abs().min(poles.z_minus.norm().ln().abs());
        let n_k = ((45.0 / strip).ceil() as usize).clamp(256, 1 << 20);
        let quad = sigma_quadrature_oracle(&p, 0.2, omega, d, pair, variant, n_k)?;
        worst = worst.max((closed - quad).norm() / quad.norm().max(4e-8));
        count += 1;
    }
    Ok((worst < 1e-9, format!("max relative deviation {worst:.2e} over {count} points")))
}

fn region_two(quick: bool) -> Result<(bool, String), mirage::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = BathParams::new(1.02, 1.0, 0.05)?;
    let (mut count, mut nonzero) = (0, 0);
    for _ in 0..if quick { 2000 } else { 20000 } {
        let omega = c(rng.gen_range(-2.5..2.5), rng.gen_range(-0.05..0.0));
        if !matches!(region_of(&p, omega), Ok(Region::II)) {
            continue;
        }
        count += 1;
        if sigma_onsite(&p, 0.2, omega, Sheet::First)?.value != c(0.0, 0.0) {
            nonzero += 1;
        }
    }
    Ok((count > 0 && nonzero == 0, format!("{nonzero} of {count} inside-loop points nonzero")))
}

fn sheet_equality(quick: bool) -> Result<(bool, String), mirage::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..if quick { 200 } else { 2000 } {
        let p = random_params(&mut rng);
        let omega = c(rng.gen_range(-3.0..3.0), rng.gen_range(-0.5..1.0));
        if !matches!(region_of(&p, omega), Ok(Region::I)) {
            continue;
        }
        let d = rng.gen_range(-5..=5);
        let (Ok(a), Ok(b)) = (sigma_cross(&p, 0.2, omega, d, SublatticePair::AB, Sheet::First), sigma_cross(&p, 0.2, omega, d, SublatticePair::AB, Sheet::Second))
        else {
            continue;
        };
        worst = worst.max((a.value - b.value).norm() / a.value.norm().max(1e-6));
        count += 1;
    }
    Ok((worst < 1e-10, format!("max relative sheet difference {worst:.2e} over {count} points")))
}

fn contraction(quick: bool) -> Result<(bool, String), mirage::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut violations = 0;
    let runs = if quick { 10 } else { 100 };
    for _ in 0..runs {
        let p = random_params(&mut rng);
        let e = EmitterSpec::new(Sublattice::A, 3, rng.gen_range(-0.5..0.5), rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.5))?;
        let op = build_heff(&p, &[e], 8, Boundary::Periodic, Sheet::First)?;
        let psi = StateVector::basis_state(op.dimension(), 0)?;
        let mut previous = 1.0;
        evolve_with(&op, &psi, &times(10.0, 20), |_, _, s| {
            let n = s.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if n > previous + 1e-10 {
                violations += 1;
            }
            previous = n;
        })?;
    }
    Ok((violations == 0, format!("{violations} norm increases over {runs} runs")))
}

fn bound_state(_quick: bool) -> Result<(bool, String), mirage::Error> {
    let p = BathParams::new(0.9, 1.0, 0.0)?;
    let e = EmitterSpec::new(Sublattice::A, 0, 0.02, 0.0, 0.1)?;
    let mut analytic = bs_wavefunction(&p, &e, Sheet::First, None)?;
    analytic.normalize();
    let op = build_heff(&p, &[e], 500, Boundary::Periodic, Sheet::First)?;
    let (lambda, v) = eigenmode_near(&op, analytic.omega_bs)?;
    let align = v.amplitudes[0].conj() / v.amplitudes[0].norm();
    let mut worst = (lambda - analytic.omega_bs).norm();
    worst = worst.max((v.amplitudes[0] * align - analytic.phi_a).norm());
    for cell in -20..=20 {
        for sub in [Sublattice::A, Sublattice::B] {
            let site = mirage::Site::new(sub, cell);
            worst = worst.max((v.amplitudes[op.site_index(site)] * align - analytic.amplitude(site)).norm());
        }
    }
    Ok((worst < 1e-8, format!("max deviation {worst:.2e}")))
}

fn contour_vs_lattice(quick: bool) -> Result<(bool, String), mirage::Error> {
    let p = BathParams::new(1.02, 1.0, 0.05)?;
    let e = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2)?;
    let grid = times(if quick { 40.0 } else { 100.0 }, 100);
    let mut worst: f64 = 0.0;
    for sheet in [Sheet::First, Sheet::Second] {
        let contour = ContourSpec::default_for(&p, &[e], sheet)?;
        let series = evolve_emitters(&p, &[e], &grid, sheet, &contour, 0)?;
        let op = build_heff(&p, &[e], 1000, Boundary::Periodic, sheet)?;
        let psi = StateVector::basis_state(op.dimension(), 0)?;
        let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Emitter(0)])?;
        for (a, b) in series.values[0].iter().zip(&lattice.values[0]) {
            worst = worst.max((a * c(0.0, 1.0) - b).norm());
        }
    }
    Ok((worst < 1e-6, format!("max amplitude deviation {worst:.2e}")))
}

fn pair_dynamics(_quick: bool) -> Result<(bool, String), mirage::Error> {
    let p = BathParams::new(1.01, 1.0, 0.1)?;
    let e = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.06, 0.1)?;
    let ne = NonlinearEmitterSpec::new(e, 0.1, 0.0, 0.0)?;
    let grid = times(20.0, 40);
    let contour = pair_emission_dynamics(&p, &ne, &grid)?;
    let op = two_excitation_build(&p, &ne, 40, Boundary::Periodic, Sheet::First)?;
    let psi = StateVector::basis_state(op.dimension(), 0)?;
    let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Pair(0, 0)])?;
    let values = contour.get(PAIR_LABEL).ok_or(mirage::Error::InvalidParams("pair series missing"))?;
    let worst = values.iter().zip(&lattice.values[0]).map(|(d, a)| (a * c(0.0, -1.0) - d).norm()).fold(0.0, f64::max);
    Ok((worst < 1e-3, format!("max deviation {worst:.2e}")))
}

fn free_g2(_quick: bool) -> Result<(bool, String), mirage::Error> {
    let p = BathParams::new(1.01, 1.0, 0.1)?;
    let e = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.06, 0.01)?;
    let mut worst: f64 = 0.0;
    for tau in [0.0, 1.0, 5.0] {
        worst = worst.max((g2(&p, &NonlinearEmitterSpec::new(e, 0.0, 0.01, 0.0)?, tau)? - 1.0).abs());
    }
    Ok((worst < 1e-9, format!("max |g2 - 1| {worst:.2e}")))
}

fn ring_spectrum(quick: bool) -> Result<(bool, String), mirage::Error> {
    let n_b = 24;
    let mut worst: f64 = 0.0;
    let j1s: &[f64] = if quick { &[0.8] } else { &[0.8, 1.05, 1.3] };
    for &j1 in j1s {
        let p = BathParams::new(j1, 1.0, 0.1)?;
        let op = build_heff(&p, &[], n_b, Boundary::Periodic, Sheet::Second)?;
        for n in 0..n_b {
            let k = 2.0 * PI * n as f64 / n_b as f64;
            for band in [Band::Upper, Band::Lower] {
                let w = dispersion(&p, k, band, BathVariant::Mirage)?;
                let (lambda, _) = eigenmode_near(&op, w + c(1e-7, 1e-7))?;
                worst = worst.max((lambda - w).norm());
            }
        }
    }
    Ok((worst < 1e-8, format!("max distance to mirage band {worst:.2e}")))
}

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let quick = cfg.quick.unwrap_or(false);
    let results: Vec<(&str, Result<(bool, String), mirage::Error>)> = CHECKS.par_iter().map(|(name, check)| (*name, check(quick))).collect();
    let mut table = Table::new(&["check", "pass", "detail"]);
    for (name, result) in results {
        let (pass, detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        table.push(vec![name.into(), if pass { "true" } else { "false" }.into(), detail.into()]);
    }
    Ok(table)
}

/// True when every row of a validation table passed.
pub fn all_passed(table: &Table) -> bool {
    let Some(col) = table.column("pass") else { return false };
    table.rows.iter().all(|r| matches!(&r[col], crate::table::Cell::Text(s) if s == "true"))
}
