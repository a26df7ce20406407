//! Run configuration: JSON file, preset or built-in defaults, then flag overrides.

use mirage::multi_excitation::NonlinearEmitterSpec;
use mirage::{BathParams, Boundary, ContourSpec, EmitterSpec, Sheet, Sublattice, SublatticePair};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Phase,
    Spectrum,
    Selfenergy,
    Bs,
    Dynamics,
    Interaction,
    G2,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub j1: f64,
    #[serde(default = "one")]
    pub j2: f64,
    #[serde(default)]
    pub gamma_b: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
pub enum SublatticeTag {
    A,
    B,
}

impl From<SublatticeTag> for Sublattice {
    fn from(t: SublatticeTag) -> Self {
        match t {
            SublatticeTag::A => Sublattice::A,
            SublatticeTag::B => Sublattice::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    pub sublattice: SublatticeTag,
    #[serde(default)]
    pub cell: i64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub gamma_a: f64,
    /// Coupling to the bath.
    pub omega: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub drive_eps: f64,
    #[serde(default)]
    pub drive_omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SheetTag {
    Physical,
    Mirage,
}

impl From<SheetTag> for Sheet {
    fn from(t: SheetTag) -> Self {
        match t {
            SheetTag::Physical => Sheet::First,
            SheetTag::Mirage => Sheet::Second,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Periodic,
    Open,
}

impl From<BoundaryTag> for Boundary {
    fn from(t: BoundaryTag) -> Self {
        match t {
            BoundaryTag::Periodic => Boundary::Periodic,
            BoundaryTag::Open => Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum VariantTag {
    Closed,
    Physical,
    Mirage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
pub enum PairTag {
    AB,
    BA,
    AA,
    BB,
}

impl From<PairTag> for SublatticePair {
    fn from(t: PairTag) -> Self {
        match t {
            PairTag::AB => SublatticePair::AB,
            PairTag::BA => SublatticePair::BA,
            PairTag::AA => SublatticePair::AA,
            PairTag::BB => SublatticePair::BB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Contour,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Amplitude,
    Population,
    RenormalizedAmplitude,
    RenormalizedPopulation,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum G2Mode {
    /// `g2(0)` per case.
    Zero,
    /// `g2(tau)` over `taus`.
    Delay,
    /// Spontaneous pair emission `D(t)` over `times`.
    Pair,
}

/// Inclusive grid of `steps + 1` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.start];
        }
        (0..=self.steps).map(|i| self.start + (self.stop - self.start) * i as f64 / self.steps as f64).collect()
    }

    fn check(&self, name: &str) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::config(format!("{name}: range bounds must be finite")));
        }
        if self.steps > 1_000_000 {
            return Err(CliError::config(format!("{name}: at most 1000000 steps")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range(Range),
}

impl Values {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Values::List(v) => v.clone(),
            Values::Range(r) => r.points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FrequencyLine {
    pub re: Range,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    pub eta: f64,
    pub span: f64,
    pub n_omega: usize,
}

/// One point of a sweep; every field left out keeps the base value.
/// `gamma_a`, `omega`, `delta` and `u` apply to every emitter; `d` moves
/// the last emitter to `d` cells from the first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Override {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sublattice: Option<SublatticeTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sheet: Option<SheetTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantTag>,
}

/// Cartesian grid of overrides, expanded in field order with the last
/// field varying fastest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub j1: Option<Values>,
    pub gamma_b: Option<Values>,
    pub gamma_a: Option<Values>,
    pub omega: Option<Values>,
    pub delta: Option<Values>,
    pub u: Option<Values>,
    pub d: Option<Vec<i64>>,
    pub sublattice: Option<Vec<SublatticeTag>>,
    pub sheet: Option<Vec<SheetTag>>,
    pub boundary: Option<Vec<BoundaryTag>>,
    pub variant: Option<Vec<VariantTag>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub grid: Option<Grid>,
    pub cases: Option<Vec<Override>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<Format>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub bath: BathConfig,
    #[serde(default)]
    pub emitters: Vec<EmitterConfig>,
    pub sheet: Option<SheetTag>,
    pub boundary: Option<BoundaryTag>,
    pub variant: Option<VariantTag>,
    pub contour: Option<ContourConfig>,
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Time grid for dynamics and pair emission.
    pub times: Option<Range>,
    /// Delay grid for `g2` in delay mode.
    pub taus: Option<Range>,
    pub j1_grid: Option<Range>,
    pub gamma_grid: Option<Range>,
    pub k_steps: Option<usize>,
    pub frequencies: Option<FrequencyLine>,
    pub distances: Option<Vec<i64>>,
    pub pair: Option<PairTag>,
    pub n_k: Option<usize>,
    pub initial: Option<usize>,
    pub observe: Option<Vec<usize>>,
    pub observable: Option<Observable>,
    pub method: Option<Method>,
    pub n_b: Option<usize>,
    pub oracle_n_b: Option<usize>,
    pub half_width: Option<usize>,
    pub g2_mode: Option<G2Mode>,
    pub quick: Option<bool>,
}

/// Fully resolved parameters of one sweep point.
#[derive(Debug, Clone)]
pub struct Case {
    pub index: usize,
    pub overrides: Override,
    pub bath: BathParams,
    pub emitters: Vec<EmitterSpec>,
    pub nonlinear: Vec<NonlinearEmitterSpec>,
    pub sheet: Sheet,
    pub boundary: Boundary,
    pub variant: VariantTag,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Schema-level checks that do not need a sweep point.
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, r) in [("times", self.times), ("taus", self.taus), ("j1_grid", self.j1_grid), ("gamma_grid", self.gamma_grid)] {
            if let Some(r) = r {
                r.check(name)?;
            }
        }
        if let Some(f) = self.frequencies {
            f.re.check("frequencies.re")?;
        }
        if let Some(init) = self.initial {
            if init >= self.emitters.len().max(1) {
                return Err(CliError::config("initial: emitter index out of range"));
            }
        }
        if let Some(obs) = &self.observe {
            if obs.iter().any(|&m| m >= self.emitters.len()) {
                return Err(CliError::config("observe: emitter index out of range"));
            }
        }
        if let Some(c) = self.contour {
            ContourSpec::new(c.eta, c.span, c.n_omega).map_err(CliError::from_library)?;
        }
        for case in self.cases()? {
            self.resolve(0, &case)?;
        }
        Ok(())
    }

    /// Sweep points in output order; a single empty override without a sweep.
    pub fn cases(&self) -> Result<Vec<Override>, CliError> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![Override::default()]);
        };
        match (&sweep.grid, &sweep.cases) {
            (Some(_), Some(_)) => Err(CliError::config("sweep: give either grid or cases, not both")),
            (None, Some(cases)) if !cases.is_empty() => Ok(cases.clone()),
            (Some(grid), None) => Ok(expand(grid)),
            _ => Err(CliError::config("sweep: empty")),
        }
    }

    pub fn resolve(&self, index: usize, o: &Override) -> Result<Case, CliError> {
        let bath = BathParams::new(o.j1.unwrap_or(self.bath.j1), o.j2.unwrap_or(self.bath.j2), o.gamma_b.unwrap_or(self.bath.gamma_b))
            .map_err(CliError::from_library)?;
        let mut configs = self.emitters.clone();
        for e in &mut configs {
            e.gamma_a = o.gamma_a.unwrap_or(e.gamma_a);
            e.omega = o.omega.unwrap_or(e.omega);
            e.delta = o.delta.unwrap_or(e.delta);
            e.u = o.u.unwrap_or(e.u);
            e.sublattice = o.sublattice.unwrap_or(e.sublattice);
        }
        if let Some(d) = o.d {
            let first = configs.first().map(|e| e.cell).unwrap_or(0);
            match configs.last_mut() {
                Some(last) if self.emitters.len() >= 2 => last.cell = first + d,
                _ => return Err(CliError::config("sweep: d needs at least two emitters")),
            }
        }
        let mut emitters = Vec::with_capacity(configs.len());
        let mut nonlinear = Vec::with_capacity(configs.len());
        for e in &configs {
            let spec = EmitterSpec::new(e.sublattice.into(), e.cell, e.delta, e.gamma_a, e.omega).map_err(CliError::from_library)?;
            nonlinear.push(NonlinearEmitterSpec::new(spec, e.u, e.drive_eps, e.drive_omega).map_err(CliError::from_library)?);
            emitters.push(spec);
        }
        Ok(Case {
            index,
            overrides: o.clone(),
            bath,
            emitters,
            nonlinear,
            sheet: o.sheet.or(self.sheet).unwrap_or(SheetTag::Physical).into(),
            boundary: o.boundary.or(self.boundary).unwrap_or(BoundaryTag::Periodic).into(),
            variant: o.variant.or(self.variant).unwrap_or(VariantTag::Physical),
        })
    }

    pub fn contour_spec(&self) -> Result<Option<ContourSpec>, CliError> {
        self.contour.map(|c| ContourSpec::new(c.eta, c.span, c.n_omega).map_err(CliError::from_library)).transpose()
    }

    pub fn require_emitters(&self, at_least: usize) -> Result<(), CliError> {
        if self.emitters.len() < at_least {
            return Err(CliError::config(format!("{:?} needs at least {at_least} emitter(s)", self.command).to_lowercase()));
        }
        Ok(())
    }
}

fn expand(grid: &Grid) -> Vec<Override> {
    let mut out = vec![Override::default()];
    fn axis<T: Clone>(out: Vec<Override>, values: Option<Vec<T>>, set: impl Fn(&mut Override, T)) -> Vec<Override> {
        let Some(values) = values else { return out };
        out.into_iter()
            .flat_map(|o| {
                values.iter().cloned().map(|v| {
                    let mut o = o.clone();
                    set(&mut o, v);
                    o
                }).collect::<Vec<_>>()
            })
            .collect()
    }
    let pts = |v: &Option<Values>| v.as_ref().map(Values::points);
    out = axis(out, pts(&grid.j1), |o, v| o.j1 = Some(v));
    out = axis(out, pts(&grid.gamma_b), |o, v| o.gamma_b = Some(v));
    out = axis(out, pts(&grid.gamma_a), |o, v| o.gamma_a = Some(v));
    out = axis(out, pts(&grid.omega), |o, v| o.omega = Some(v));
    out = axis(out, pts(&grid.delta), |o, v| o.delta = Some(v));
    out = axis(out, pts(&grid.u), |o, v| o.u = Some(v));
    out = axis(out, grid.d.clone(), |o, v| o.d = Some(v));
    out = axis(out, grid.sublattice.clone(), |o, v| o.sublattice = Some(v));
    out = axis(out, grid.sheet.clone(), |o, v| o.sheet = Some(v));
    out = axis(out, grid.boundary.clone(), |o, v| o.boundary = Some(v));
    out = axis(out, grid.variant.clone(), |o, v| o.variant = Some(v));
    out
}
