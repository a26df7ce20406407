//! One module per subcommand. Sweep commands produce a table per case; the
//! runner prefixes the varied parameters and concatenates in case order.

mod bs;
mod dynamics;
mod g2;
mod interaction;
mod phase;
mod selfenergy;
mod spectrum;
pub mod validate;

use mirage::Complex64;
use rayon::prelude::*;

use crate::config::{Case, Command, Override, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

type CaseRunner = fn(&RunConfig, &Case) -> Result<Table, CliError>;

pub fn execute(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Table, CliError> {
    let runner: CaseRunner = match cfg.command {
        Command::Phase => return pool.install(|| phase::run(cfg)),
        Command::Validate => return pool.install(|| validate::run(cfg)),
        Command::Spectrum => spectrum::run,
        Command::Selfenergy => selfenergy::run,
        Command::Bs => bs::run,
        Command::Dynamics => dynamics::run,
        Command::Interaction => interaction::run,
        Command::G2 => g2::run,
    };
    let overrides = cfg.cases()?;
    let cases: Vec<Case> = overrides.iter().enumerate().map(|(i, o)| cfg.resolve(i, o)).collect::<Result<_, _>>()?;
    let tables: Vec<Result<Table, CliError>> = pool.install(|| cases.par_iter().map(|c| runner(cfg, c)).collect());
    merge(&overrides, tables)
}

/// Override columns in fixed order, restricted to those some case sets.
fn varied_columns(overrides: &[Override]) -> Vec<&'static str> {
    const ORDER: [&str; 12] = ["j1", "j2", "gamma_b", "gamma_a", "omega", "delta", "u", "d", "sublattice", "sheet", "boundary", "variant"];
    ORDER
        .into_iter()
        .filter(|name| overrides.iter().any(|o| override_cell(o, name).is_some()))
        .collect()
}

fn tag<T: serde::Serialize>(t: &T) -> Cell {
    match serde_json::to_value(t) {
        Ok(serde_json::Value::String(s)) => Cell::Text(s),
        _ => Cell::Text(String::new()),
    }
}

fn override_cell(o: &Override, name: &str) -> Option<Cell> {
    match name {
        "j1" => o.j1.map(Cell::from),
        "j2" => o.j2.map(Cell::from),
        "gamma_b" => o.gamma_b.map(Cell::from),
        "gamma_a" => o.gamma_a.map(Cell::from),
        "omega" => o.omega.map(Cell::from),
        "delta" => o.delta.map(Cell::from),
        "u" => o.u.map(Cell::from),
        "d" => o.d.map(Cell::from),
        "sublattice" => o.sublattice.as_ref().map(tag),
        "sheet" => o.sheet.as_ref().map(tag),
        "boundary" => o.boundary.as_ref().map(tag),
        "variant" => o.variant.as_ref().map(tag),
        _ => None,
    }
}

fn merge(overrides: &[Override], tables: Vec<Result<Table, CliError>>) -> Result<Table, CliError> {
    let varied = varied_columns(overrides);
    let mut out: Option<Table> = None;
    for (i, (o, table)) in overrides.iter().zip(tables).enumerate() {
        let table = table?;
        let merged = out.get_or_insert_with(|| {
            let mut columns: Vec<String> = core::iter::once("case").chain(varied.iter().copied()).map(String::from).collect();
            columns.extend(table.columns.iter().cloned());
            Table { columns, rows: Vec::new(), x: table.x.clone(), plot: table.plot.clone(), group: table.group.clone() }
        });
        if merged.columns.len() != varied.len() + 1 + table.columns.len() || merged.columns[varied.len() + 1..] != table.columns[..] {
            return Err(CliError::config("sweep cases produce different columns"));
        }
        let prefix: Vec<Cell> = core::iter::once(Cell::from(i))
            .chain(varied.iter().map(|name| override_cell(o, name).unwrap_or_else(|| Cell::Text(String::new()))))
            .collect();
        for row in table.rows {
            let mut full = prefix.clone();
            full.extend(row);
            merged.rows.push(full);
        }
    }
    out.ok_or_else(|| CliError::config("no sweep cases"))
}

/// `re_name, im_name` cells.
fn complex_cells(z: Complex64) -> [Cell; 2] {
    [z.re.into(), z.im.into()]
}
