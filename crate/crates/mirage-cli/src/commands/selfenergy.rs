//! Self-energy along a horizontal frequency line, with an optional
//! Brillouin-zone quadrature column.

use mirage::self_energy::{poles_for, sigma_cross, sigma_quadrature_oracle};
use mirage::{BathParams, BathVariant, Complex64, Error, Region, Sheet, SublatticePair};

use super::complex_cells;
use crate::config::{Case, FrequencyLine, PairTag, Range, RunConfig, VariantTag};
use crate::error::CliError;
use crate::table::{Cell, Table};

const DEFAULT_LINE: FrequencyLine = FrequencyLine { re: Range { start: -3.0, stop: 3.0, steps: 600 }, im: 0.1 };

/// Trapezoid points for round-off accuracy given the pole distance to the unit circle.
fn adaptive_points(params: &BathParams, omega: Complex64, variant: BathVariant) -> Result<usize, Error> {
    let poles = poles_for(params, omega, variant)?;
    let strip = poles.z_plus.norm().ln().abs().min(poles.z_minus.norm().ln().abs());
    Ok(((45.0 / strip).ceil() as usize).clamp(256, 1 << 21))
}

/// Points on a branch loop or too close to the spectrum become NaN rows.
fn soft<T>(r: Result<T, Error>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::OnBranchLoop { .. } | Error::NearSpectrum { .. } | Error::DegenerateQuadratic) => Ok(None),
        Err(e) => Err(CliError::from_library(e)),
    }
}

pub fn run(cfg: &RunConfig, case: &Case) -> Result<Table, CliError> {
    let line = cfg.frequencies.unwrap_or(DEFAULT_LINE);
    let pair: SublatticePair = cfg.pair.unwrap_or(PairTag::AB).into();
    let distances = cfg.distances.clone().unwrap_or_else(|| vec![0]);
    let rabi = case.emitters.first().map_or(1.0, |e| e.omega_rabi);
    let (params, sheet, variant) = match case.variant {
        VariantTag::Closed => (case.bath.closed(), Sheet::First, BathVariant::Closed),
        VariantTag::Physical => (case.bath, Sheet::First, BathVariant::Physical),
        VariantTag::Mirage => (case.bath, Sheet::Second, BathVariant::Mirage),
    };
    let oracle = cfg.n_k;
    let mut columns = vec!["d", "re_omega", "im_omega", "re_sigma", "im_sigma", "region"];
    if oracle.is_some() {
        columns.extend(["re_oracle", "im_oracle", "abs_delta"]);
    }
    let mut table = Table::new(&columns).plotting("re_omega", &["re_sigma", "im_sigma"]).grouping(&["d"]);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    for &d in &distances {
        for re in line.re.points() {
            let omega = Complex64::new(re, line.im);
            let value = soft(sigma_cross(&params, rabi, omega, d, pair, sheet))?;
            let sigma = value.map_or(nan, |v| v.value);
            let region = match value.map(|v| v.region) {
                Some(Some(Region::I)) => "I",
                Some(Some(Region::II)) => "II",
                _ => "loop",
            };
            let mut row: Vec<Cell> = vec![d.into()];
            row.extend(complex_cells(omega));
            row.extend(complex_cells(sigma));
            row.push(region.into());
            if let Some(n_k) = oracle {
                let n = match n_k {
                    0 => soft(adaptive_points(&params, omega, variant))?,
                    n => Some(n),
                };
                let quad = match n {
                    Some(n) => soft(sigma_quadrature_oracle(&params, rabi, omega, d, pair, variant, n))?.unwrap_or(nan),
                    None => nan,
                };
                row.extend(complex_cells(quad));
                row.push((sigma - quad).norm().into());
            }
            table.push(row);
        }
    }
    Ok(table)
}
