//! Bound-state profile of the first emitter, optionally against the
//! lattice eigenvector nearest its energy.

use mirage::bound_states::{bs_midgap_closed_form, bs_wavefunction, obc_dark_state};
use mirage::lattice::{build_heff, eigenmode_near};
use mirage::{Boundary, Complex64, Site, Sublattice};

use super::complex_cells;
use crate::config::{Case, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

const DEFAULT_OBC_CELLS: usize = 20;

pub fn run(cfg: &RunConfig, case: &Case) -> Result<Table, CliError> {
    cfg.require_emitters(1)?;
    let e = case.emitters[0];
    let mut state = match case.boundary {
        Boundary::Open => obc_dark_state(&case.bath, &e, cfg.n_b.unwrap_or(DEFAULT_OBC_CELLS))?,
        Boundary::Periodic if e.is_midgap(&case.bath) => bs_midgap_closed_form(&case.bath, &e, case.sheet, cfg.half_width)?,
        Boundary::Periodic => bs_wavefunction(&case.bath, &e, case.sheet, cfg.half_width)?,
    };
    state.normalize();

    let oracle_cells = match case.boundary {
        Boundary::Open => cfg.oracle_n_b.map(|_| cfg.n_b.unwrap_or(DEFAULT_OBC_CELLS)),
        Boundary::Periodic => cfg.oracle_n_b,
    };
    let lattice = match oracle_cells {
        Some(n_b) => {
            let op = build_heff(&case.bath, &[e], n_b, case.boundary, case.sheet)?;
            let (lambda, v) = eigenmode_near(&op, state.omega_bs)?;
            let a0 = v.amplitudes[0];
            let align = if a0.norm() > 0.0 { a0.conj() / a0.norm() } else { Complex64::new(1.0, 0.0) };
            let amps: Vec<Complex64> = v.amplitudes.iter().map(|a| a * align).collect();
            Some((lambda, op, amps))
        }
        None => None,
    };

    let mut columns = vec!["cell", "re_f_a", "im_f_a", "abs_f_a", "re_f_b", "im_f_b", "abs_f_b", "re_omega_bs", "im_omega_bs", "abs_phi_a"];
    if lattice.is_some() {
        columns.extend(["lattice_abs_f_a", "lattice_abs_f_b", "lattice_re_omega", "lattice_im_omega", "lattice_abs_phi_a"]);
    }
    let mut table = Table::new(&columns).plotting("cell", &["abs_f_a", "abs_f_b"]);
    for (i, cell) in state.window.clone().enumerate() {
        let (fa, fb) = (state.f_a[i], state.f_b[i]);
        let mut row: Vec<Cell> = vec![cell.into()];
        row.extend(complex_cells(fa));
        row.push(fa.norm().into());
        row.extend(complex_cells(fb));
        row.push(fb.norm().into());
        row.extend(complex_cells(state.omega_bs));
        row.push(state.phi_a.norm().into());
        if let Some((lambda, op, amps)) = &lattice {
            let on_lattice = match case.boundary {
                Boundary::Open => (0..op.n_b as i64).contains(&cell),
                // One representative per ring site, centred on the emitter.
                Boundary::Periodic => {
                    let half = op.n_b as i64 / 2;
                    (e.cell - half..e.cell - half + op.n_b as i64).contains(&cell)
                }
            };
            for sub in [Sublattice::A, Sublattice::B] {
                let v = if on_lattice { amps[op.site_index(Site::new(sub, cell))].norm() } else { f64::NAN };
                row.push(v.into());
            }
            row.extend(complex_cells(*lambda));
            row.push(amps[0].norm().into());
        }
        table.push(row);
    }
    Ok(table)
}
