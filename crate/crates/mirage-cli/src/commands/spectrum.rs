//! Bath bands over the Brillouin zone for one variant.

use core::f64::consts::PI;

use mirage::bath::dispersion;
use mirage::{Band, BathVariant};

use crate::config::{Case, RunConfig, VariantTag};
use crate::error::CliError;
use crate::table::Table;

const DEFAULT_STEPS: usize = 256;

pub fn run(cfg: &RunConfig, case: &Case) -> Result<Table, CliError> {
    let variant = match case.variant {
        VariantTag::Closed => BathVariant::Closed,
        VariantTag::Physical => BathVariant::Physical,
        VariantTag::Mirage => BathVariant::Mirage,
    };
    let steps = cfg.k_steps.unwrap_or(DEFAULT_STEPS).max(1);
    let mut table = Table::new(&["k", "re_upper", "im_upper", "re_lower", "im_lower"]).plotting("re_upper", &["im_upper"]);
    for i in 0..=steps {
        let k = -PI + 2.0 * PI * i as f64 / steps as f64;
        let up = dispersion(&case.bath, k, Band::Upper, variant)?;
        let low = dispersion(&case.bath, k, Band::Lower, variant)?;
        table.push(vec![k.into(), up.re.into(), up.im.into(), low.re.into(), low.im.into()]);
    }
    Ok(table)
}
