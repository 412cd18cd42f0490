//! `sphercool` command-line front end.
//!
//! Configuration is layered: schema defaults, then `--preset`, then
//! `--config`, then `--set KEY=VALUE`, then command flags.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use commands::{Artifacts, CommandKind};
use config::RunConfig;
use error::CliError;

pub const PAPER_SCENARIO: &str = include_str!("../presets/paper_scenario.conf");

#[derive(Debug, Parser)]
#[command(name = "sphercool", version, about = "Radiation pressure, WGM lines and Doppler cooling of microspheres")]
pub struct Cli {
    /// Config file of `key = value` lines (a previous report also works).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Bundled parameter set applied before --config.
    #[arg(long, global = true, value_parser = ["paper_scenario"])]
    pub preset: Option<String>,

    /// Override one config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Output prefix: writes PREFIX.report.txt and, for tables, PREFIX.csv.
    /// Defaults to the command name in the current directory.
    #[arg(long, short, global = true, value_name = "PREFIX")]
    pub output: Option<PathBuf>,

    /// Do not echo the report to stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Q_ext, Q_rad and force over a size-parameter range.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        x_min: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x_max: Option<String>,
        #[arg(long)]
        step: Option<String>,
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        power: Option<String>,
    },
    /// Locate and fit one WGM line.
    Resonance {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        x_min: Option<String>,
        #[arg(long)]
        x_max: Option<String>,
    },
    /// Damping coefficients, cooling times and the Doppler limit.
    Limits,
    /// Gas drag in both regimes and the crossover pressure.
    Gas {
        #[arg(long)]
        pressure: Option<String>,
        #[arg(long)]
        radius: Option<String>,
    },
    /// Simulate the stochastic 1-D dynamics.
    Cool {
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        duration: Option<String>,
        #[arg(long)]
        timestep: Option<String>,
    },
    /// Fabry-Perot or ring-cavity force sweep over one free spectral range.
    Toy {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        reflectivity: Option<String>,
        #[arg(long)]
        reflectivity2: Option<String>,
        #[arg(long)]
        mirrors: Option<String>,
        #[arg(long)]
        points: Option<String>,
    },
}

impl Command {
    fn kind_and_flags(&self) -> (CommandKind, Vec<(&'static str, &Option<String>)>) {
        match self {
            Command::Spectrum { x_min, x_max, step, index, power } => (
                CommandKind::Spectrum,
                vec![
                    ("spectrum.x_min", x_min),
                    ("spectrum.x_max", x_max),
                    ("spectrum.step", step),
                    ("sphere.index", index),
                    ("spectrum.power_w", power),
                ],
            ),
            Command::Resonance { kind, n, l, index, x_min, x_max } => (
                CommandKind::Resonance,
                vec![
                    ("resonance.kind", kind),
                    ("resonance.n", n),
                    ("resonance.l", l),
                    ("sphere.index", index),
                    ("resonance.x_min", x_min),
                    ("resonance.x_max", x_max),
                ],
            ),
            Command::Limits => (CommandKind::Limits, vec![]),
            Command::Gas { pressure, radius } => (
                CommandKind::Gas,
                vec![("gas.pressure_pa", pressure), ("sphere.radius_m", radius)],
            ),
            Command::Cool { seed, duration, timestep } => (
                CommandKind::Cool,
                vec![("sim.seed", seed), ("sim.duration_s", duration), ("sim.timestep_s", timestep)],
            ),
            Command::Toy { model, reflectivity, reflectivity2, mirrors, points } => (
                CommandKind::Toy,
                vec![
                    ("toy.model", model),
                    ("toy.reflectivity", reflectivity),
                    ("toy.reflectivity2", reflectivity2),
                    ("toy.mirrors", mirrors),
                    ("toy.points", points),
                ],
            ),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves the layered configuration for `cli`.
pub fn resolve_config(cli: &Cli) -> Result<(CommandKind, RunConfig), CliError> {
    let mut cfg = RunConfig::with_defaults();
    if cli.preset.as_deref() == Some("paper_scenario") {
        cfg.apply_text(PAPER_SCENARIO, "preset paper_scenario")?;
    }
    if let Some(path) = &cli.config {
        cfg.apply_text(&read_file(path)?, &path.display().to_string())?;
    }
    for item in &cli.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got '{item}'")))?;
        cfg.set(k.trim(), v)?;
    }
    let (kind, flags) = cli.command.kind_and_flags();
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    // An explicit reflectivity flag replaces whichever form came from files.
    if let Command::Toy { reflectivity, reflectivity2, .. } = &cli.command {
        match (reflectivity, reflectivity2) {
            (Some(_), None) => cfg.remove("toy.reflectivity2"),
            (None, Some(_)) => cfg.remove("toy.reflectivity"),
            _ => {}
        }
    }
    Ok((kind, cfg))
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Runs a parsed command and returns the artifacts and the files written.
pub fn run_cli(cli: &Cli) -> Result<(Artifacts, Vec<PathBuf>), CliError> {
    let (kind, cfg) = resolve_config(cli)?;
    let artifacts = commands::execute(kind, &cfg)?;
    let prefix = cli.output.clone().unwrap_or_else(|| PathBuf::from(kind.name()));
    let mut written = Vec::new();
    if let Some(csv) = &artifacts.csv {
        let path = with_suffix(&prefix, ".csv");
        write_atomic(&path, csv)?;
        written.push(path);
    }
    let path = with_suffix(&prefix, ".report.txt");
    write_atomic(&path, &artifacts.report.render())?;
    written.push(path);
    Ok((artifacts, written))
}

/// Entry point: parses `args`, runs, prints, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok((artifacts, written)) => {
            if !cli.quiet {
                print!("{}", artifacts.report.render());
                for p in written {
                    eprintln!("wrote {}", p.display());
                }
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
