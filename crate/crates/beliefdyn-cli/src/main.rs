//! Command-line front end: load a scenario, dispatch the solvers or the
//! simulator, emit CSV and plain-text reports, run the cross-validation
//! battery.
//!
//! Exit codes: 0 success, 1 validation failures, 2 configuration errors,
//! 3 fixed point not converged (results still written), 4 unsupported
//! scenario for the requested solver, 5 time step too large.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beliefdyn::config::{
    build_scenario, parse_config, snapshot_scenario, to_toml, ConfigFile, ManifestMeta, PresetRef,
    RunSettings,
};
use beliefdyn::model::{
    AlphaShape, CommunityMode, InitialCondition, PresetParams, ScenarioSpec,
};
use beliefdyn::Error;

mod commands;
mod validate;

#[derive(Parser)]
#[command(
    name = "beliefdyn",
    version,
    about = "Mean-field belief dynamics: stationary/transient solvers and agent-level Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the stationary belief density
    Stationary(StationaryArgs),
    /// Solve the time-dependent density (unbounded confidence only)
    Transient(TransientArgs),
    /// Run the agent-level Monte Carlo simulator
    Mc(McArgs),
    /// Run the reduced-scale cross-validation battery
    Validate(ValidateArgs),
    /// List the available scenario presets
    Scenarios,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario configuration file (TOML); run manifests are accepted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (see `beliefdyn scenarios`)
    #[arg(long)]
    preset: Option<String>,
    /// Preset stubbornness parameter
    #[arg(long)]
    alpha: Option<f64>,
    /// Preset noise variance parameter
    #[arg(long)]
    sigma2: Option<f64>,
    /// Preset exponent parameter (inhomogeneous / proximity)
    #[arg(long)]
    n: Option<u32>,
    /// Community interaction level
    #[arg(long)]
    kappa: Option<f64>,
    /// Stubbornness shape for the inhomogeneous preset
    #[arg(long, value_parser = parse_shape)]
    shape: Option<AlphaShape>,
    /// Community mode (symmetric | one-sided)
    #[arg(long, value_parser = parse_mode)]
    mode: Option<CommunityMode>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Grid sizes as np,nx
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Master seed for stochastic components
    #[arg(long)]
    seed: Option<u64>,
    /// Cap worker parallelism
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct StationaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Convergence tolerance of the fixed point iteration (L1)
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap for the fixed point loop
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct TransientArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Final time
    #[arg(long)]
    t_final: Option<f64>,
    /// Time step
    #[arg(long)]
    dt: Option<f64>,
    /// Initial condition: `prejudice` or `gaussian:MEAN,VAR`
    #[arg(long, value_parser = parse_init)]
    init: Option<InitialCondition>,
    /// Times at which to write density snapshots, comma separated
    #[arg(long, value_delimiter = ',')]
    snapshot_times: Option<Vec<f64>>,
    /// Laplace-domain consistency check at these frequencies
    #[arg(long, value_delimiter = ',')]
    laplace_check: Option<Vec<f64>>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of agents
    #[arg(long, visible_alias = "U")]
    agents: Option<usize>,
    /// Final time
    #[arg(long)]
    t_final: Option<f64>,
    /// Time step
    #[arg(long)]
    dt: Option<f64>,
    /// Record summaries/histograms every this many steps
    #[arg(long)]
    record_every: Option<usize>,
    /// Histogram bins as p_bins,x_bins
    #[arg(long, value_parser = parse_grid)]
    bins: Option<(usize, usize)>,
    /// Initial condition: `prejudice` or `gaussian:MEAN,VAR`
    #[arg(long, value_parser = parse_init)]
    init: Option<InitialCondition>,
    /// Compare the long-run histogram against a density CSV and print L1
    #[arg(long)]
    validate_against: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Only run checks whose name contains this substring
    #[arg(long)]
    only: Option<String>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated integers, e.g. 201,401".into());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_shape(s: &str) -> Result<AlphaShape, String> {
    match s {
        "one-minus-abs" => Ok(AlphaShape::OneMinusAbs),
        "abs" => Ok(AlphaShape::Abs),
        other => Err(format!("unknown shape '{other}' (one-minus-abs | abs)")),
    }
}

fn parse_mode(s: &str) -> Result<CommunityMode, String> {
    match s {
        "symmetric" => Ok(CommunityMode::Symmetric),
        "one-sided" => Ok(CommunityMode::OneSided),
        other => Err(format!("unknown mode '{other}' (symmetric | one-sided)")),
    }
}

fn parse_init(s: &str) -> Result<InitialCondition, String> {
    if s == "prejudice" {
        return Ok(InitialCondition::Prejudice);
    }
    if let Some(rest) = s.strip_prefix("gaussian:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            let mean: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
            let var: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
            if !(var >= 0.0) {
                return Err("gaussian variance must be nonnegative".into());
            }
            return Ok(InitialCondition::Gaussian { mean, var });
        }
    }
    Err(format!(
        "unknown initial condition '{s}' (prejudice | gaussian:MEAN,VAR)"
    ))
}

/// Everything a command needs after flag/file/preset resolution.
pub struct ResolvedRun {
    pub spec: ScenarioSpec,
    pub run: RunSettings,
    pub out_dir: PathBuf,
    pub scenario_source: String,
}

fn resolve(common: &CommonArgs, extra_run: RunSettings) -> Result<ResolvedRun, Error> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        None => ConfigFile::default(),
    };

    // Flags override file contents, which override preset defaults.
    if let Some(name) = &common.preset {
        let params = match cfg.preset.take() {
            Some(p) if &p.name == name => p.params,
            _ => PresetParams::default(),
        };
        cfg.preset = Some(PresetRef {
            name: name.clone(),
            params,
        });
    }
    if let Some(preset) = cfg.preset.as_mut() {
        if common.alpha.is_some() {
            preset.params.alpha = common.alpha;
        }
        if common.sigma2.is_some() {
            preset.params.sigma2 = common.sigma2;
        }
        if common.n.is_some() {
            preset.params.n = common.n;
        }
        if common.kappa.is_some() {
            preset.params.kappa = common.kappa;
        }
        if common.shape.is_some() {
            preset.params.shape = common.shape;
        }
        if common.mode.is_some() {
            preset.params.mode = common.mode;
        }
    } else if common.alpha.is_some() || common.sigma2.is_some() {
        return Err(Error::Config(
            "--alpha/--sigma2 tune a preset; name one with --preset or in the config".into(),
        ));
    }

    let spec = build_scenario(&cfg)?;

    let flag_run = RunSettings {
        np: common.grid.map(|g| g.0),
        nx: common.grid.map(|g| g.1),
        seed: common.seed,
        threads: common.threads,
        ..Default::default()
    };
    let run = cfg
        .run
        .clone()
        .unwrap_or_default()
        .overridden_by(&flag_run)
        .overridden_by(&extra_run);

    if let Some(threads) = run.threads {
        // Ignore failure: the pool can only be initialized once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let scenario_source = match (&common.config, &common.preset, &cfg.preset) {
        (Some(path), _, _) => format!("config:{}", path.display()),
        (None, Some(name), _) => format!("preset:{name}"),
        (None, None, Some(p)) => format!("preset:{}", p.name),
        _ => "explicit".to_string(),
    };

    Ok(ResolvedRun {
        spec,
        run,
        out_dir: common.out.clone(),
        scenario_source,
    })
}

/// Writes the run manifest before any results, so a run can be reproduced
/// from its output directory alone.
pub fn write_manifest(resolved: &ResolvedRun, command: &str) -> Result<(), Error> {
    std::fs::create_dir_all(&resolved.out_dir)?;
    let mut cfg = snapshot_scenario(&resolved.spec);
    cfg.run = Some(resolved.run.clone());
    cfg.manifest = Some(ManifestMeta {
        command: command.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        unix_time_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        scenario_source: resolved.scenario_source.clone(),
        output_dir: resolved.out_dir.display().to_string(),
    });
    std::fs::write(resolved.out_dir.join("manifest.toml"), to_toml(&cfg)?)?;
    Ok(())
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Error> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NotConverged { .. } => 3,
        Error::BeliefDependentZeta => 4,
        Error::StepTooLarge(_) => 5,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Stationary(args) => commands::stationary(args),
        Command::Transient(args) => commands::transient(args),
        Command::Mc(args) => commands::mc(args),
        Command::Validate(args) => validate::run(&args.only),
        Command::Scenarios => {
            for (name, summary) in beliefdyn::model::preset_catalog() {
                println!("{name:14} {summary}");
            }
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
