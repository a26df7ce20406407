//! Kerr emitter: steady-state `g2`, its delay dependence, and spontaneous
//! pair emission.

use mirage::lattice::{evolve_state, two_excitation_build};
use mirage::multi_excitation::{g2_series, pair_emission_dynamics_on, PAIR_LABEL};
use mirage::{BasisLabel, Complex64, Sheet, StateVector};

use crate::config::{Case, G2Mode, Range, RunConfig, SheetTag};
use crate::error::CliError;
use crate::table::{Cell, Table};

const DEFAULT_TAUS: Range = Range { start: 0.0, stop: 20.0, steps: 400 };
const DEFAULT_TIMES: Range = Range { start: 0.0, stop: 50.0, steps: 200 };

pub fn run(cfg: &RunConfig, case: &Case) -> Result<Table, CliError> {
    cfg.require_emitters(1)?;
    let emitter = case.nonlinear[0];
    match cfg.g2_mode.unwrap_or(G2Mode::Zero) {
        G2Mode::Zero => {
            let mut table = Table::new(&["g2"]);
            table.push(vec![g2_series(&case.bath, &emitter, &[0.0])?[0].into()]);
            Ok(table)
        }
        G2Mode::Delay => {
            let taus = cfg.taus.unwrap_or(DEFAULT_TAUS).points();
            let values = g2_series(&case.bath, &emitter, &taus)?;
            let mut table = Table::new(&["tau", "g2"]).plotting("tau", &["g2"]);
            for (tau, g) in taus.into_iter().zip(values) {
                table.push(vec![tau.into(), g.into()]);
            }
            Ok(table)
        }
        G2Mode::Pair => {
            let times = cfg.times.unwrap_or(DEFAULT_TIMES).points();
            // Pair emission is reported on the mirage sheet unless asked otherwise.
            let sheet: Sheet = case.overrides.sheet.or(cfg.sheet).unwrap_or(SheetTag::Mirage).into();
            let series = pair_emission_dynamics_on(&case.bath, &emitter, &times, sheet)?;
            let values = series.get(PAIR_LABEL).ok_or_else(|| CliError::config("pair series missing"))?;
            let oracle = match cfg.oracle_n_b {
                Some(n_b) => {
                    let op = two_excitation_build(&case.bath, &emitter, n_b, case.boundary, Sheet::First)?;
                    let psi = StateVector::basis_state(op.dimension(), 0)?;
                    Some(evolve_state(&op, &psi, &times, &[BasisLabel::Pair(0, 0)])?.values.remove(0))
                }
                None => None,
            };
            let mut columns = vec!["t", "re_amplitude", "im_amplitude", "abs_amplitude"];
            if oracle.is_some() {
                columns.extend(["lattice_re_amplitude", "lattice_im_amplitude", "lattice_abs_delta"]);
            }
            let mut table = Table::new(&columns).plotting("t", &["abs_amplitude"]);
            let i = Complex64::new(0.0, 1.0);
            for (k, &t) in times.iter().enumerate() {
                let a = values[k] * i;
                let mut row: Vec<Cell> = vec![t.into(), a.re.into(), a.im.into(), a.norm().into()];
                if let Some(o) = &oracle {
                    row.extend([o[k].re.into(), o[k].im.into(), (a - o[k]).norm().into()]);
                }
                table.push(row);
            }
            Ok(table)
        }
    }
}
