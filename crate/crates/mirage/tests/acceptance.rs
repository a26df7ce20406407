//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` fail for reasons recorded in the project
//! decisions ledger; the run exits nonzero only when a criterion outside that
//! list fails, or when a listed one starts passing.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use mirage::bath::{dispersion, mirage_map, region_of};
use mirage::bound_states::{bs_midgap_closed_form, bs_wavefunction, obc_dark_state};
use mirage::dynamics::{evolve_emitters, rabi_frequency_estimate, ContourSpec};
use mirage::lattice::{build_heff, build_heff_with, eigenmode_near, evolve_state, evolve_with, two_excitation_build, CouplingGauge};
use mirage::multi_excitation::{g2, g2_series, pair_emission_dynamics, PAIR_LABEL};
use mirage::self_energy::{interaction_single_pole, poles_for, sigma_cross, sigma_onsite, sigma_quadrature_oracle};
use mirage::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: [u8; 2] = [5, 9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn times(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spectrum_distance(params: &BathParams, omega: Complex64, variant: BathVariant) -> f64 {
    let n = 4096;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let k = -PI + 2.0 * PI * i as f64 / n as f64;
        for band in [Band::Upper, Band::Lower] {
            best = best.min((dispersion(params, k, band, variant).unwrap() - omega).norm());
        }
    }
    best
}

/// Trapezoid points needed for the quadrature to reach round-off, from the
/// distance of the poles to the unit circle.
fn quadrature_points(params: &BathParams, omega: Complex64, variant: BathVariant) -> usize {
    let poles = poles_for(params, omega, variant).unwrap();
    let strip = poles.z_plus.norm().ln().abs().min(poles.z_minus.norm().ln().abs());
    ((45.0 / strip).ceil() as usize).clamp(256, 1 << 21)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs = [SublatticePair::AA, SublatticePair::BB, SublatticePair::AB, SublatticePair::BA];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let gamma = rng.gen_range(0.0..0.4);
        let p = BathParams::new(rng.gen_range(0.3..1.8), 1.0, gamma).unwrap();
        let variant = [BathVariant::Closed, BathVariant::Physical, BathVariant::Mirage][rng.gen_range(0..3)];
        let omega = c(rng.gen_range(-3.5..3.5), rng.gen_range(-0.8..0.4));
        if spectrum_distance(&p, omega, variant) < 0.05 {
            continue;
        }
        let pair = pairs[rng.gen_range(0..4)];
        let d = rng.gen_range(-4..=4);
        let rabi = rng.gen_range(0.05..0.3);
        let closed = match variant {
            BathVariant::Closed => sigma_cross(&p.closed(), rabi, omega, d, pair, Sheet::First),
            BathVariant::Physical => sigma_cross(&p, rabi, omega, d, pair, Sheet::First),
            BathVariant::Mirage => sigma_cross(&p, rabi, omega, d, pair, Sheet::Second),
        }
        .unwrap()
        .value;
        let quad = sigma_quadrature_oracle(&p, rabi, omega, d, pair, variant, quadrature_points(&p, omega, variant)).unwrap();
        // Relative error with a round-off floor for values that vanish exactly.
        let err = (closed - quad).norm() / quad.norm().max(1e-6 * rabi * rabi);
        worst = worst.max(err);
        count += 1;
    }
    outcome(worst < 1e-9, format!("max relative deviation {worst:.2e} over {count} points"))
}

fn criterion_2() -> Outcome {
    let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut count = 0;
    let mut nonzero = 0;
    while count < 1000 {
        let omega = c(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.0));
        match region_of(&p, omega) {
            Ok(Region::II) => {}
            _ => continue,
        }
        count += 1;
        if sigma_onsite(&p, 0.2, omega, Sheet::First).unwrap().value != c(0.0, 0.0) {
            nonzero += 1;
        }
    }
    outcome(nonzero == 0, format!("{nonzero} of {count} region-II points give a nonzero self-energy"))
}

struct BsCase {
    label: String,
    params: BathParams,
    emitter: EmitterSpec,
    sheet: Sheet,
    boundary: Boundary,
    n_b: usize,
}

/// Largest site-wise deviation between an analytic bound state and the
/// lattice eigenvector nearest its energy, after phase alignment.
fn bs_deviation(case: &BsCase) -> f64 {
    let e = case.emitter;
    let analytic = match case.boundary {
        Boundary::Open => obc_dark_state(&case.params, &e, case.n_b).unwrap(),
        Boundary::Periodic if e.is_midgap(&case.params) => bs_midgap_closed_form(&case.params, &e, case.sheet, None).unwrap(),
        Boundary::Periodic => bs_wavefunction(&case.params, &e, case.sheet, None).unwrap(),
    };
    let op = build_heff(&case.params, &[e], case.n_b, case.boundary, case.sheet).unwrap();
    let (lambda, v) = eigenmode_near(&op, analytic.omega_bs).unwrap();
    // Ring profile: images of the infinite-lattice amplitudes summed cell by cell.
    let mut expected = vec![c(0.0, 0.0); op.dimension()];
    expected[0] = analytic.phi_a;
    for cell in analytic.window.clone() {
        for sub in [Sublattice::A, Sublattice::B] {
            let site = Site::new(sub, cell);
            expected[op.site_index(site)] += analytic.amplitude(site);
        }
    }
    let norm = expected.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps = &v.amplitudes;
    let align = amps[0].conj() / amps[0].norm();
    let reference = expected[0].conj() / expected[0].norm() / norm;
    let mut worst = (lambda - analytic.omega_bs).norm();
    for (a, b) in amps.iter().zip(&expected) {
        worst = worst.max((a * align - b * reference).norm());
    }
    worst
}

fn bs_cases() -> Vec<BsCase> {
    let mut cases = Vec::new();
    let subs = [Sublattice::A, Sublattice::B];
    for j1 in [0.9, 1.1] {
        for delta in [0.0, 0.02] {
            for sub in subs {
                cases.push(BsCase {
                    label: format!("closed j1={j1} delta={delta} {sub:?}"),
                    params: BathParams::new(j1, 1.0, 0.0).unwrap(),
                    emitter: EmitterSpec::new(sub, 0, delta, 0.0, 0.1).unwrap(),
                    sheet: Sheet::First,
                    boundary: Boundary::Periodic,
                    n_b: 500,
                });
            }
        }
    }
    for (sheet, j1s) in [(Sheet::First, vec![0.9, 1.03, 1.1]), (Sheet::Second, vec![0.9, 1.1])] {
        for j1 in j1s {
            for delta in [0.0, 0.02] {
                for sub in subs {
                    cases.push(BsCase {
                        label: format!("{sheet:?} j1={j1} delta={delta} {sub:?}"),
                        params: BathParams::new(j1, 1.0, 0.1).unwrap(),
                        emitter: EmitterSpec::new(sub, 0, delta, 0.1, 0.1).unwrap(),
                        sheet,
                        boundary: Boundary::Periodic,
                        n_b: 500,
                    });
                }
            }
        }
    }
    for j1 in [0.9, 1.1] {
        for sub in subs {
            cases.push(BsCase {
                label: format!("open j1={j1} {sub:?}"),
                params: BathParams::new(j1, 1.0, 0.1).unwrap(),
                emitter: EmitterSpec::new(sub, 10, 0.0, 0.1, 0.1).unwrap(),
                sheet: Sheet::First,
                boundary: Boundary::Open,
                n_b: 20,
            });
        }
    }
    cases
}

fn criterion_3() -> Outcome {
    let cases = bs_cases();
    let mut failures = Vec::new();
    let mut worst_pass: f64 = 0.0;
    for case in &cases {
        let dev = bs_deviation(case);
        if dev < 1e-8 {
            worst_pass = worst_pass.max(dev);
        } else {
            // Larger rings shrink the error when it comes from images around the ring.
            let bigger = bs_deviation(&BsCase { n_b: 1500, label: String::new(), ..*case });
            failures.push(format!("{}: {dev:.1e} (n_b=1500: {bigger:.1e})", case.label));
        }
    }
    // The mirage point between the two regimes, reported but not gated.
    let extra: Vec<String> = [0.0, 0.02]
        .iter()
        .flat_map(|&delta| [Sublattice::A, Sublattice::B].map(move |sub| (delta, sub)))
        .map(|(delta, sub)| {
            let case = BsCase {
                label: String::new(),
                params: BathParams::new(1.03, 1.0, 0.1).unwrap(),
                emitter: EmitterSpec::new(sub, 0, delta, 0.1, 0.1).unwrap(),
                sheet: Sheet::Second,
                boundary: Boundary::Periodic,
                n_b: 500,
            };
            format!("{:.0e}", bs_deviation(&case))
        })
        .collect();
    let detail = if failures.is_empty() {
        format!("{} cases, max deviation {worst_pass:.1e}; mirage j1=1.03 (ungated) {}", cases.len(), extra.join("/"))
    } else {
        format!("{} of {} cases within 1e-8 (max {worst_pass:.1e}); over: {}", cases.len() - failures.len(), cases.len(), failures.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn fig2b_emitter() -> EmitterSpec {
    EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2).unwrap()
}

fn criterion_4() -> Outcome {
    let grid = times(100.0, 400);
    let e = fig2b_emitter();
    let mut worst_single: f64 = 0.0;
    for j1 in [0.7, 1.02, 1.1] {
        let p = BathParams::new(j1, 1.0, 0.05).unwrap();
        let run = |sheet| evolve_emitters(&p, &[e], &grid, sheet, &ContourSpec::default_for(&p, &[e], sheet).unwrap(), 0).unwrap();
        let (a, b) = (run(Sheet::First), run(Sheet::Second));
        for (x, y) in a.values[0].iter().zip(&b.values[0]) {
            worst_single = worst_single.max((x.norm() - y.norm()).abs());
        }
    }
    // Ten emitters alternating A/B on consecutive cells, leftmost excited.
    let p = BathParams::new(1.1, 1.0, 0.05).unwrap();
    let chain: Vec<EmitterSpec> = (0..10)
        .map(|m| EmitterSpec::new(if m % 2 == 0 { Sublattice::A } else { Sublattice::B }, m as i64, 0.0, 0.05, 0.2).unwrap())
        .collect();
    let grid = times(100.0, 100);
    let watched = [BasisLabel::Emitter(0), BasisLabel::Emitter(4), BasisLabel::Emitter(7)];
    let run = |sheet, gauge| {
        let op = build_heff_with(&p, &chain, 2000, Boundary::Periodic, sheet, gauge).unwrap();
        let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
        evolve_state(&op, &psi, &grid, &watched).unwrap()
    };
    let physical = run(Sheet::First, CouplingGauge::Rescaled);
    let rescaled = run(Sheet::Second, CouplingGauge::Rescaled);
    let bare = run(Sheet::Second, CouplingGauge::Bare);
    let diff = |a: &TimeSeries, b: &TimeSeries| {
        a.values.iter().zip(&b.values).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p.norm() - q.norm()).abs())).fold(0.0, f64::max)
    };
    let positive = diff(&physical, &rescaled);
    let negative = diff(&physical, &bare);
    outcome(
        worst_single < 1e-6 && positive < 1e-6 && negative > 1e-3,
        format!("single emitter {worst_single:.1e}; ten-emitter chain rescaled {positive:.1e}, unrescaled control {negative:.1e}"),
    )
}

fn two_emitters(j1: f64) -> (BathParams, [EmitterSpec; 2]) {
    let p = BathParams::new(j1, 1.0, 0.05).unwrap();
    let es = [
        EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2).unwrap(),
        EmitterSpec::new(Sublattice::B, 10, 0.0, 0.05, 0.2).unwrap(),
    ];
    (p, es)
}

fn criterion_5() -> Outcome {
    let (p, es) = two_emitters(1.02);
    let grid = times(400.0, 4000);
    let contour = ContourSpec::default_for(&p, &es, Sheet::Second).unwrap();
    let s = evolve_emitters(&p, &es, &grid, Sheet::Second, &contour, 1).unwrap();
    let measured = rabi_frequency_estimate(&s, "a1", p.gamma_b);
    let midgap = c(0.0, -p.half_gamma());
    let ab = interaction_single_pole(&p, 0.2, midgap, 10, SublatticePair::AB, Sheet::Second).unwrap();
    let ba = interaction_single_pole(&p, 0.2, midgap, 10, SublatticePair::BA, Sheet::Second).unwrap();
    let predicted = 2.0 * (ab * ba).sqrt().norm();
    // Weight of the bound-state pole, from the slope of the on-site self-energy.
    let step = 1e-5;
    let slope = (sigma_onsite(&p, 0.2, midgap + step, Sheet::Second).unwrap().value - sigma_onsite(&p, 0.2, midgap - step, Sheet::Second).unwrap().value) / (2.0 * step);
    let weighted = predicted / (1.0 - slope).norm();
    let (p2, es2) = two_emitters(0.98);
    let window = times(p2.j1 / 0.04, 2000);
    let s2 = evolve_emitters(&p2, &es2, &window, Sheet::Second, &ContourSpec::default_for(&p2, &es2, Sheet::Second).unwrap(), 1).unwrap();
    let control = rabi_frequency_estimate(&s2, "a1", p2.gamma_b);
    let quiet = matches!(control, Err(Error::NoOscillationDetected));
    match measured {
        Ok(f) => {
            let rel = (f - predicted).abs() / predicted;
            outcome(
                rel < 0.1 && quiet,
                format!("j1=1.02 measured {f:.4} vs 2 sqrt(S_AB S_BA) = {predicted:.4} (off by {:.0}%, pole-weighted {weighted:.4}); j1=0.98 oscillation {}", rel * 100.0, if quiet { "absent" } else { "present" }),
            )
        }
        Err(e) => outcome(false, format!("j1=1.02 frequency extraction failed: {e}")),
    }
}

fn criterion_6() -> Outcome {
    let grid = times(100.0, 200);
    let e = fig2b_emitter();
    let mut worst: f64 = 0.0;
    for j1 in [0.7, 1.02, 1.1] {
        let p = BathParams::new(j1, 1.0, 0.05).unwrap();
        let op = build_heff(&p, &[e], 2000, Boundary::Periodic, Sheet::First).unwrap();
        let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
        let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Emitter(0)]).unwrap();
        let exact = evolve_emitters(&p, &[e], &grid, Sheet::First, &ContourSpec::default_for(&p, &[e], Sheet::First).unwrap(), 0).unwrap();
        for (a, b) in lattice.values[0].iter().zip(&exact.values[0]) {
            worst = worst.max((a.norm_sqr() - b.norm_sqr()).abs());
        }
    }
    outcome(worst < 1e-4, format!("max |n1 difference| {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let grid = times(50.0, 100);
    let blue = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.06, 0.01).unwrap();
    let red = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.2, 0.2).unwrap();
    let sets = [
        (BathParams::new(1.01, 1.0, 0.1).unwrap(), NonlinearEmitterSpec::new(blue, 0.1, 0.0, 0.0).unwrap()),
        (BathParams::new(1.1, 1.0, 1.0).unwrap(), NonlinearEmitterSpec::new(red, 0.4, 0.0, 0.0).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    for (p, ne) in sets {
        let op = two_excitation_build(&p, &ne, 60, Boundary::Periodic, Sheet::First).unwrap();
        let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
        let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Pair(0, 0)]).unwrap();
        let route = pair_emission_dynamics(&p, &ne, &grid).unwrap();
        for (a, d) in lattice.values[0].iter().zip(route.get(PAIR_LABEL).unwrap()) {
            worst = worst.max((a * c(0.0, -1.0) - d).norm());
        }
    }
    outcome(worst < 1e-3, format!("max |D difference| {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let p = BathParams::new(1.01, 1.0, 0.1).unwrap();
    let base = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.06, 0.01).unwrap();
    let free = g2(&p, &NonlinearEmitterSpec::new(base, 0.0, 0.01, 0.0).unwrap(), 0.0).unwrap();
    let mut largest: f64 = 0.0;
    let mut jump: f64 = 0.0;
    for i in 0..10 {
        let u = 0.05 + 0.05 * i as f64;
        let ne = NonlinearEmitterSpec::new(base, u, 0.01, 0.0).unwrap();
        let v = g2_series(&p, &ne, &[0.0, 1e-9]).unwrap();
        largest = largest.max(v[0]);
        jump = jump.max((v[1] - v[0]).abs());
    }
    outcome(
        free == 1.0 && largest < 1.0 && jump < 1e-6,
        format!("g2(0) at U=0: {free}; max g2(0) for U in [0.05, 0.5]: {largest:.4}; max jump at zero delay {jump:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let n_b = 60;
    let mut worst_hausdorff: f64 = 0.0;
    let mut worst_band: f64 = 0.0;
    for j1 in [0.7, 1.02, 1.1] {
        let p = BathParams::new(j1, 1.0, 0.05).unwrap();
        let mirage = build_heff(&p, &[], n_b, Boundary::Periodic, Sheet::Second).unwrap();
        let open = build_heff(&p, &[], n_b, Boundary::Open, Sheet::First).unwrap();
        let ring = schur(&mirage);
        let chain = schur(&open);
        let m = mirage_map(&p).unwrap();
        let center = c(0.0, -p.half_gamma());
        let (lo, hi) = ((m.j1_tilde - p.j2).abs(), m.j1_tilde + p.j2);
        // Edge modes sit inside the mirage gap.
        let bulk: Vec<Complex64> = chain.into_iter().filter(|w| (w - center).norm() >= lo - 1e-9).collect();
        for w in &bulk {
            let r = (w - center).norm();
            let band = (w.im + p.half_gamma()).abs() + (lo - r).max(0.0) + (r - hi).max(0.0);
            worst_band = worst_band.max(band);
        }
        worst_hausdorff = worst_hausdorff.max(hausdorff(&ring, &bulk));
    }
    outcome(
        worst_hausdorff < 1e-6,
        format!("Hausdorff distance {worst_hausdorff:.1e} at n_b=60; every open-chain bulk eigenvalue lies on the mirage band to {worst_band:.1e}"),
    )
}

fn schur(op: &LatticeOperator) -> Vec<Complex64> {
    op.matrix.to_dense().schur().eigenvalues().unwrap().iter().copied().collect()
}

fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    one_way(a, b).max(one_way(b, a))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let grid = times(30.0, 60);
    let mut norm_rise: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for _ in 0..100 {
        let gamma = rng.gen_range(0.0..0.5);
        let p = BathParams::new(rng.gen_range(0.3..1.7), 1.0, gamma).unwrap();
        let n = rng.gen_range(1..=3);
        let es: Vec<EmitterSpec> = (0..n)
            .map(|_| {
                let sub = if rng.gen_bool(0.5) { Sublattice::A } else { Sublattice::B };
                EmitterSpec::new(sub, rng.gen_range(0..6), rng.gen_range(-0.5..0.5), rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.4)).unwrap()
            })
            .collect();
        let op = build_heff(&p, &es, 24, Boundary::Periodic, Sheet::First).unwrap();
        let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
        let mut previous = 1.0;
        evolve_with(&op, &psi, &grid, |_, _, s| {
            let norm = s.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            norm_rise = norm_rise.max(norm - previous);
            previous = norm;
        })
        .unwrap();
        let sheet = if p.j1 > p.half_gamma() && rng.gen_bool(0.5) { Sheet::Second } else { Sheet::First };
        let s = evolve_emitters(&p, &es, &grid, sheet, &ContourSpec::default_for(&p, &es, sheet).unwrap(), 0).unwrap();
        for v in s.values.iter().flatten() {
            largest = largest.max(v.norm());
        }
    }
    outcome(
        norm_rise <= 1e-10 && largest <= 1.0 + 1e-8,
        format!("largest norm increase {norm_rise:.1e}; max |G(t)| {largest:.10}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u8, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {verdict} ({secs:.1} s) {}", out.detail);
        if out.pass == KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcome matches expectations (known red: {KNOWN_RED:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
