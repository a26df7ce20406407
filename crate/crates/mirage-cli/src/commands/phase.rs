//! Phase diagrams of the physical and mirage baths on a `(j1, gamma_b)` grid.

use mirage::bath::{classify_mirage_phase, classify_phase};
use mirage::{BathParams, Error, PhaseLabel};
use rayon::prelude::*;

use crate::config::{Range, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

const DEFAULT_J1: Range = Range { start: 0.0, stop: 2.0, steps: 200 };
const DEFAULT_GAMMA: Range = Range { start: 0.0, stop: 1.0, steps: 100 };

fn label(result: Result<PhaseLabel, Error>) -> Result<&'static str, CliError> {
    Ok(match result {
        Ok(PhaseLabel::TopologicalLineGap) => "topological_line_gap",
        Ok(PhaseLabel::PointGap) => "point_gap",
        Ok(PhaseLabel::TrivialLineGap) => "trivial_line_gap",
        Ok(PhaseLabel::Topological) => "topological",
        Ok(PhaseLabel::Trivial) => "trivial",
        Err(Error::OnPhaseBoundary { .. }) => "boundary",
        Err(Error::MirageUndefined { .. }) => "undefined",
        Err(e) => return Err(CliError::from_library(e)),
    })
}

/// Numeric code for plotting: topological 0, point gap 1, trivial 2.
fn code(label: &str) -> f64 {
    match label {
        "topological_line_gap" | "topological" => 0.0,
        "point_gap" => 1.0,
        "trivial_line_gap" | "trivial" => 2.0,
        _ => f64::NAN,
    }
}

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let j1s = cfg.j1_grid.unwrap_or(DEFAULT_J1).points();
    let gammas = cfg.gamma_grid.unwrap_or(DEFAULT_GAMMA).points();
    let points: Vec<(f64, f64)> = j1s.iter().flat_map(|&j| gammas.iter().map(move |&g| (j, g))).collect();
    let rows: Vec<Result<Vec<Cell>, CliError>> = points
        .par_iter()
        .map(|&(j1, gamma)| {
            let p = BathParams::new(j1, cfg.bath.j2, gamma).map_err(CliError::from_library)?;
            let physical = label(classify_phase(&p))?;
            let mirage = label(classify_mirage_phase(&p))?;
            Ok(vec![j1.into(), gamma.into(), physical.into(), mirage.into(), code(physical).into(), code(mirage).into()])
        })
        .collect();
    let mut table = Table::new(&["j1", "gamma_b", "physical", "mirage", "physical_code", "mirage_code"]).plotting("j1", &["physical_code", "mirage_code"]);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}
