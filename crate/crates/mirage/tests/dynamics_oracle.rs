use mirage::dynamics::{bath_contour, bath_correlation_series, evolve_emitters, ContourSpec};
use mirage::lattice::{build_heff, evolve_state};
use mirage::{BasisLabel, BathParams, Boundary, Complex64, EmitterSpec, Sheet, Site, StateVector, Sublattice};

fn times(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn fig2b_emitter() -> EmitterSpec {
    EmitterSpec::new(Sublattice::A, 0, 0.0, 0.05, 0.2).unwrap()
}

#[test]
fn contour_matches_lattice_in_all_three_regimes() {
    let grid = times(100.0, 200);
    let e = fig2b_emitter();
    for j1 in [0.7, 1.02, 1.1] {
        let p = BathParams::new(j1, 1.0, 0.05).unwrap();
        let op = build_heff(&p, &[e], 2000, Boundary::Periodic, Sheet::First).unwrap();
        let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
        let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Emitter(0)]).unwrap();
        let contour = ContourSpec::default_for(&p, &[e], Sheet::First).unwrap();
        let exact = evolve_emitters(&p, &[e], &grid, Sheet::First, &contour, 0).unwrap();
        let worst = lattice.values[0]
            .iter()
            .zip(&exact.values[0])
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max);
        eprintln!("j1 {j1}: {worst:e}");
        assert!(worst < 1e-4);
    }
}

#[test]
fn both_sheets_give_the_same_dynamics() {
    let grid = times(100.0, 400);
    let e = fig2b_emitter();
    for j1 in [0.7, 1.02, 1.1] {
        let p = BathParams::new(j1, 1.0, 0.05).unwrap();
        let first = evolve_emitters(&p, &[e], &grid, Sheet::First, &ContourSpec::default_for(&p, &[e], Sheet::First).unwrap(), 0).unwrap();
        let second = evolve_emitters(&p, &[e], &grid, Sheet::Second, &ContourSpec::default_for(&p, &[e], Sheet::Second).unwrap(), 0).unwrap();
        let worst = first.values[0].iter().zip(&second.values[0]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        eprintln!("j1 {j1}: {worst:e}");
        assert!(worst < 1e-6);
    }
}

#[test]
fn bath_propagator_matches_lattice() {
    let grid = times(60.0, 60);
    let p = BathParams::new(1.02, 1.0, 0.05).unwrap();
    let op = build_heff(&p, &[], 2000, Boundary::Periodic, Sheet::First).unwrap();
    let start = Site::new(Sublattice::B, 1000);
    let psi = StateVector::basis_state(op.dimension(), op.site_index(start)).unwrap();
    let watched = [Site::new(Sublattice::A, 1000), Site::new(Sublattice::B, 1003), Site::new(Sublattice::A, 996)];
    let labels: Vec<BasisLabel> = watched.iter().map(|&s| BasisLabel::Bath(s)).collect();
    let lattice = evolve_state(&op, &psi, &grid, &labels).unwrap();
    for sheet in [Sheet::First, Sheet::Second] {
        let contour = bath_contour(&p, sheet).unwrap();
        for (site, expected) in watched.iter().zip(&lattice.values) {
            let c = bath_correlation_series(&p, &grid, *site, start, sheet, &contour).unwrap();
            let worst = c.iter().zip(expected).map(|(a, b)| (a - b * Complex64::new(0.0, -1.0)).norm()).fold(0.0, f64::max);
            assert!(worst < 1e-5, "{sheet:?} {site:?}: {worst:e}");
        }
    }
}

#[test]
fn boundaries_do_not_matter_before_the_echo() {
    let grid = times(80.0, 80);
    let e = EmitterSpec::new(Sublattice::B, 200, 0.1, 0.05, 0.2).unwrap();
    for j1 in [0.7, 1.1] {
        let p = BathParams::new(j1, 1.0, 0.05).unwrap();
        let run = |boundary| {
            let op = build_heff(&p, &[e], 400, boundary, Sheet::First).unwrap();
            let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
            evolve_state(&op, &psi, &grid, &[BasisLabel::Emitter(0)]).unwrap()
        };
        let (ring, chain) = (run(Boundary::Periodic), run(Boundary::Open));
        let worst = ring.values[0].iter().zip(&chain.values[0]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "j1 {j1}: {worst:e}");
    }
}

#[test]
fn far_detuned_emitter_matches_lattice() {
    let grid = times(40.0, 80);
    let p = BathParams::new(1.1, 1.0, 0.05).unwrap();
    let e = EmitterSpec::new(Sublattice::B, 0, 6.0, 0.05, 0.3).unwrap();
    let op = build_heff(&p, &[e], 400, Boundary::Periodic, Sheet::First).unwrap();
    let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
    let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Emitter(0)]).unwrap();
    for sheet in [Sheet::First, Sheet::Second] {
        let exact = evolve_emitters(&p, &[e], &grid, sheet, &ContourSpec::default_for(&p, &[e], sheet).unwrap(), 0).unwrap();
        let worst = lattice.values[0].iter().zip(&exact.values[0]).map(|(a, b)| (a * Complex64::new(0.0, -1.0) - b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{sheet:?}: {worst:e}");
    }
}
