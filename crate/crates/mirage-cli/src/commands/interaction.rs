//! Single-pole emitter-emitter interaction against `j1` for several separations.

use mirage::self_energy::interaction_single_pole;
use mirage::{BathParams, Complex64, Error, SublatticePair};

use crate::config::{Case, Range, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

const DEFAULT_J1: Range = Range { start: 0.5, stop: 1.5, steps: 200 };
const DEFAULT_DISTANCES: [i64; 4] = [0, 1, 3, 10];

pub fn run(cfg: &RunConfig, case: &Case) -> Result<Table, CliError> {
    let j1s = match cfg.j1_grid {
        Some(r) => r.points(),
        None if case.overrides.j1.is_some() => vec![case.bath.j1],
        None => DEFAULT_J1.points(),
    };
    let distances = cfg.distances.clone().unwrap_or_else(|| DEFAULT_DISTANCES.to_vec());
    let hg = case.bath.half_gamma();
    let (rabi, delta_prime) = match case.emitters.first() {
        Some(e) => (e.omega_rabi, e.delta_prime()),
        None => (1.0, Complex64::new(0.0, -hg)),
    };
    let mut table = Table::new(&["d", "j1", "re_ab", "im_ab", "abs_ab", "re_ba", "im_ba", "abs_ba"])
        .plotting("j1", &["abs_ab", "abs_ba"])
        .grouping(&["d"]);
    for &d in &distances {
        for &j1 in &j1s {
            let p = BathParams::new(j1, case.bath.j2, case.bath.gamma_b)?;
            let mut row: Vec<Cell> = vec![d.into(), j1.into()];
            for pair in [SublatticePair::AB, SublatticePair::BA] {
                let v = match interaction_single_pole(&p, rabi, delta_prime, d, pair, case.sheet) {
                    Ok(v) => v,
                    Err(Error::OnPhaseBoundary { .. } | Error::MirageUndefined { .. }) => Complex64::new(f64::NAN, f64::NAN),
                    Err(e) => return Err(e.into()),
                };
                row.extend([v.re.into(), v.im.into(), v.norm().into()]);
            }
            table.push(row);
        }
    }
    Ok(table)
}
