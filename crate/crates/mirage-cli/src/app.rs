//! Flag parsing, config assembly and the single output writer.

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::commands::{self, validate};
use crate::config::{BoundaryTag, Command, Format, Range, RunConfig, SheetTag};
use crate::error::CliError;
use crate::presets;
use crate::svg;

const WORKERS_VAR: &str = "MIRAGE_WORKERS";
const DEFAULT_TIME_STEPS: usize = 400;

#[derive(Debug, Parser)]
#[command(name = "mirage", version, about = "Quantum emitters in closed, dissipative and mirage SSH photonic baths")]
pub struct Args {
    pub command: Command,
    /// JSON run configuration; replaces the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named preset (figure data set); defaults per command.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG plot to this path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub sheet: Option<SheetTag>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryTag>,
    #[arg(long)]
    pub j1: Option<f64>,
    #[arg(long)]
    pub j2: Option<f64>,
    #[arg(long = "gamma-b")]
    pub gamma_b: Option<f64>,
    /// Cell separations, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d: Option<Vec<i64>>,
    #[arg(long = "n-b")]
    pub n_b: Option<usize>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Smaller validation suite.
    #[arg(long)]
    pub quick: bool,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    pub print_config: bool,
    /// Print the configuration JSON schema and exit.
    #[arg(long)]
    pub print_schema: bool,
    /// List presets and exit.
    #[arg(long)]
    pub list_presets: bool,
}

pub fn schema() -> String {
    let mut s = serde_json::to_string_pretty(&schemars::schema_for!(RunConfig)).expect("schema serializes");
    s.push('\n');
    s
}

/// Base configuration from `--config` or a preset, then flag overrides.
pub fn assemble(args: &Args) -> Result<RunConfig, CliError> {
    let (text, origin) = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(CliError::config("give either --config or --preset, not both")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            (text, path.display().to_string())
        }
        (None, name) => {
            let name = name.as_deref().unwrap_or_else(|| presets::default_for(args.command));
            let text = presets::get(name).ok_or_else(|| CliError::config(format!("unknown preset {name:?}")))?;
            (text.to_owned(), format!("preset {name}"))
        }
    };
    let mut cfg = RunConfig::from_json(&text)?;
    if cfg.command != args.command {
        return Err(CliError::config(format!("{origin} is for the {:?} command", cfg.command).to_lowercase()));
    }
    if let Some(s) = args.sheet {
        cfg.sheet = Some(s);
        strip_axis(&mut cfg, |o| o.sheet = None, |g| g.sheet = None);
    }
    if let Some(b) = args.boundary {
        cfg.boundary = Some(b);
        strip_axis(&mut cfg, |o| o.boundary = None, |g| g.boundary = None);
    }
    if let Some(j1) = args.j1 {
        cfg.bath.j1 = j1;
        strip_axis(&mut cfg, |o| o.j1 = None, |g| g.j1 = None);
    }
    if let Some(j2) = args.j2 {
        cfg.bath.j2 = j2;
    }
    if let Some(g) = args.gamma_b {
        cfg.bath.gamma_b = g;
        strip_axis(&mut cfg, |o| o.gamma_b = None, |g| g.gamma_b = None);
    }
    if let Some(d) = &args.d {
        match cfg.command {
            Command::Dynamics | Command::Bs | Command::G2 => {
                let [d] = d[..] else { return Err(CliError::config("--d takes one separation for this command")) };
                if cfg.emitters.len() < 2 {
                    return Err(CliError::config("--d needs at least two emitters"));
                }
                let first = cfg.emitters[0].cell;
                cfg.emitters.last_mut().expect("two emitters").cell = first + d;
                strip_axis(&mut cfg, |o| o.d = None, |g| g.d = None);
            }
            _ => cfg.distances = Some(d.clone()),
        }
    }
    if let Some(n_b) = args.n_b {
        cfg.n_b = Some(n_b);
    }
    if let Some(t) = args.t_max {
        let steps = cfg.times.map_or(DEFAULT_TIME_STEPS, |r| r.steps);
        cfg.times = Some(Range { start: 0.0, stop: t, steps });
    }
    if args.quick {
        cfg.quick = Some(true);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Removes a sweep axis that a flag has pinned; drops the sweep when nothing varies.
fn strip_axis(cfg: &mut RunConfig, case: impl Fn(&mut crate::config::Override), grid: impl Fn(&mut crate::config::Grid)) {
    let Some(sweep) = cfg.sweep.as_mut() else { return };
    if let Some(cases) = sweep.cases.as_mut() {
        cases.iter_mut().for_each(&case);
        cases.dedup();
    }
    if let Some(g) = sweep.grid.as_mut() {
        grid(g);
    }
    let empty_cases = sweep.cases.as_ref().is_some_and(|c| c.iter().all(|o| *o == Default::default()));
    let empty_grid = sweep.grid.as_ref().is_some_and(|g| *g == Default::default());
    if empty_cases || empty_grid {
        cfg.sweep = None;
    }
}

fn workers() -> Result<rayon::ThreadPool, CliError> {
    let n = match std::env::var(WORKERS_VAR) {
        Ok(v) => v.parse::<usize>().map_err(|_| CliError::config(format!("{WORKERS_VAR} must be a non-negative integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CliError::config(format!("worker pool: {e}")))
}

fn write_to(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

pub fn run(args: Args) -> Result<(), CliError> {
    if args.print_schema {
        return write_to(None, &schema());
    }
    if args.list_presets {
        let mut text: String = presets::names().map(|n| format!("{n}\n")).collect();
        if text.is_empty() {
            text.push('\n');
        }
        return write_to(None, &text);
    }
    let cfg = assemble(&args)?;
    if args.print_config {
        let mut text = serde_json::to_string_pretty(&cfg).expect("config serializes");
        text.push('\n');
        return write_to(None, &text);
    }
    let pool = workers()?;
    let table = commands::execute(&cfg, &pool)?;

    let format = args.format.or(cfg.output.format).unwrap_or(Format::Csv);
    let out = args.out.clone().or_else(|| cfg.output.path.clone().map(PathBuf::from));
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    write_to(out.as_ref(), &text)?;
    if let Some(path) = args.svg.clone().or_else(|| cfg.output.svg.clone().map(PathBuf::from)) {
        if let Some(plot) = svg::render(&table) {
            std::fs::write(path, plot)?;
        }
    }
    if cfg.command == Command::Validate && !validate::all_passed(&table) {
        return Err(CliError::Validation("some validation checks failed".into()));
    }
    Ok(())
}
