use mirage::lattice::{evolve_state, two_excitation_build};
use mirage::multi_excitation::{pair_emission_dynamics, PAIR_LABEL};
use mirage::{BasisLabel, BathParams, Boundary, Complex64, EmitterSpec, NonlinearEmitterSpec, Sheet, StateVector, Sublattice};

fn times(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn fig4c_sets() -> [(BathParams, NonlinearEmitterSpec); 2] {
    let blue = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.06, 0.01).unwrap();
    let red = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.2, 0.2).unwrap();
    [
        (BathParams::new(1.01, 1.0, 0.1).unwrap(), NonlinearEmitterSpec::new(blue, 0.1, 0.0, 0.0).unwrap()),
        (BathParams::new(1.1, 1.0, 1.0).unwrap(), NonlinearEmitterSpec::new(red, 0.4, 0.0, 0.0).unwrap()),
    ]
}

#[test]
fn pair_dynamics_matches_two_excitation_lattice() {
    let grid = times(50.0, 100);
    for (p, ne) in fig4c_sets() {
        let op = two_excitation_build(&p, &ne, 60, Boundary::Periodic, Sheet::First).unwrap();
        let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
        let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Pair(0, 0)]).unwrap();
        let contour = pair_emission_dynamics(&p, &ne, &grid).unwrap();
        let worst = lattice.values[0]
            .iter()
            .zip(contour.get(PAIR_LABEL).unwrap())
            .map(|(a, d)| (a * Complex64::new(0.0, -1.0) - d).norm())
            .fold(0.0, f64::max);
        eprintln!("{p:?}: {worst:e}");
        assert!(worst < 1e-3);
    }
}

#[test]
fn strong_kerr_pins_the_pair_on_the_emitter() {
    // Far-detuned double occupation leaks only through its own loss.
    let p = BathParams::new(1.05, 1.0, 0.1).unwrap();
    let e = EmitterSpec::new(Sublattice::A, 0, 0.0, 0.1, 0.2).unwrap();
    let ne = NonlinearEmitterSpec::new(e, 50.0, 0.0, 0.0).unwrap();
    let grid = times(20.0, 40);
    let d = pair_emission_dynamics(&p, &ne, &grid).unwrap();
    let op = two_excitation_build(&p, &ne, 40, Boundary::Periodic, Sheet::First).unwrap();
    let psi = StateVector::basis_state(op.dimension(), 0).unwrap();
    let lattice = evolve_state(&op, &psi, &grid, &[BasisLabel::Pair(0, 0)]).unwrap();
    for ((t, v), a) in grid.iter().zip(d.get(PAIR_LABEL).unwrap()).zip(&lattice.values[0]) {
        assert!((a * Complex64::new(0.0, -1.0) - v).norm() < 1e-4, "t {t}: {v} vs lattice {a}");
        let expected = (-e.gamma_a * t).exp();
        assert!((v.norm() - expected).abs() < 1e-3, "t {t}: {} vs {expected}", v.norm());
    }
}
