//! Single-excitation emitter dynamics from the contour transform or from
//! direct integration on a finite lattice.

use mirage::dynamics::{evolve_emitters, evolve_emitters_checked};
use mirage::lattice::{build_heff, evolve_state};
use mirage::{BasisLabel, Complex64, ContourSpec, StateVector, TimeSeries};

use crate::config::{Case, Method, Observable, Range, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

pub const DEFAULT_TIMES: Range = Range { start: 0.0, stop: 100.0, steps: 400 };
const DEFAULT_LATTICE_CELLS: usize = 2000;
const USER_CONTOUR_TOL: f64 = 1e-6;

/// Amplitudes `<0|a_m(t) a_n^dag|0>` of every observed emitter.
fn lattice_amplitudes(case: &Case, n_b: usize, initial: usize, observe: &[usize], times: &[f64]) -> Result<Vec<Vec<Complex64>>, CliError> {
    let op = build_heff(&case.bath, &case.emitters, n_b, case.boundary, case.sheet)?;
    let start = op.index_of(BasisLabel::Emitter(initial)).ok_or_else(|| CliError::config("initial emitter not in basis"))?;
    let psi = StateVector::basis_state(op.dimension(), start)?;
    let labels: Vec<BasisLabel> = observe.iter().map(|&m| BasisLabel::Emitter(m)).collect();
    Ok(evolve_state(&op, &psi, times, &labels)?.values)
}

fn contour_amplitudes(cfg: &RunConfig, case: &Case, initial: usize, observe: &[usize], times: &[f64]) -> Result<Vec<Vec<Complex64>>, CliError> {
    // A hand-picked contour is checked against its own refinement.
    let series: TimeSeries = match cfg.contour_spec()? {
        Some(c) => evolve_emitters_checked(&case.bath, &case.emitters, times, case.sheet, &c, initial, USER_CONTOUR_TOL)?,
        None => {
            let c = ContourSpec::default_for(&case.bath, &case.emitters, case.sheet)?;
            evolve_emitters(&case.bath, &case.emitters, times, case.sheet, &c, initial)?
        }
    };
    // The transform yields the retarded function, -i times the amplitude.
    let i = Complex64::new(0.0, 1.0);
    Ok(observe.iter().map(|&m| series.values[m].iter().map(|v| v * i).collect()).collect())
}

pub fn observable_name(o: Observable) -> &'static str {
    match o {
        Observable::Amplitude => "amplitude",
        Observable::Population => "population",
        Observable::RenormalizedAmplitude => "renormalized_amplitude",
        Observable::RenormalizedPopulation => "renormalized_population",
        Observable::Complex => "abs",
    }
}

/// Presentation transform of an amplitude at time `t`.
pub fn observe(o: Observable, c: Complex64, t: f64, gamma_b: f64) -> f64 {
    match o {
        Observable::Amplitude | Observable::Complex => c.norm(),
        Observable::Population => c.norm_sqr(),
        Observable::RenormalizedAmplitude => (0.5 * gamma_b * t).exp() * c.norm(),
        Observable::RenormalizedPopulation => (gamma_b * t).exp() * c.norm_sqr(),
    }
}

pub fn run(cfg: &RunConfig, case: &Case) -> Result<Table, CliError> {
    cfg.require_emitters(1)?;
    let times = cfg.times.unwrap_or(DEFAULT_TIMES).points();
    let initial = cfg.initial.unwrap_or(0);
    let observe_list: Vec<usize> = cfg.observe.clone().unwrap_or_else(|| (0..case.emitters.len()).collect());
    let observable = cfg.observable.unwrap_or(Observable::Population);
    let values = match cfg.method.unwrap_or(Method::Contour) {
        Method::Contour => contour_amplitudes(cfg, case, initial, &observe_list, &times)?,
        Method::Lattice => lattice_amplitudes(case, cfg.n_b.unwrap_or(DEFAULT_LATTICE_CELLS), initial, &observe_list, &times)?,
    };
    let oracle = match cfg.oracle_n_b {
        Some(n_b) => Some(lattice_amplitudes(case, n_b, initial, &observe_list, &times)?),
        None => None,
    };
    let name = observable_name(observable);
    let mut columns = vec!["emitter", "t", "re_amplitude", "im_amplitude", name];
    if oracle.is_some() {
        columns.extend(["lattice_re_amplitude", "lattice_im_amplitude", "lattice_abs_delta"]);
    }
    let mut table = Table::new(&columns).plotting("t", &[name]).grouping(&["emitter"]);
    let gamma_b = case.bath.gamma_b;
    for (k, &m) in observe_list.iter().enumerate() {
        for (i, &t) in times.iter().enumerate() {
            let c = values[k][i];
            let mut row: Vec<Cell> = vec![m.into(), t.into(), c.re.into(), c.im.into(), observe(observable, c, t, gamma_b).into()];
            if let Some(o) = &oracle {
                let l = o[k][i];
                row.extend([l.re.into(), l.im.into(), (c - l).norm().into()]);
            }
            table.push(row);
        }
    }
    Ok(table)
}
