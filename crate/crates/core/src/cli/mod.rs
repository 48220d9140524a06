//! Command-line front end. [`run`] parses arguments, merges flags over the
//! optional TOML config, runs one command and maps errors to exit codes:
//! 0 ok, 2 invalid input, 3 numerical failure, 4 internal error.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    appraise, assess, assessment_artifacts, build, export, filter_transactions, fit, load_config_city,
    load_config_model, load_config_registry, load_config_scorer, run_assessment, scenario_set, simulate, synth,
    write_artifacts, Artifact, AssessMode, Assessment,
};
pub use config::{FitParams, Paths, RunConfig, ScenarioParams, SynthParams};

use crate::Result;

#[derive(Debug, Parser)]
#[command(name = "ada", version, about = "Automated design appraisal from simulated views")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the city model and write it with joint groups resolved.
    Build,
    /// Simulate visual shares, view metrics and VC for every building.
    Simulate,
    /// Fit the hedonic model to a transactions CSV.
    Fit,
    /// Price buildings from simulated VC and an attributes CSV.
    Appraise,
    /// Appraise design scenarios against the as-built model.
    Assess {
        #[command(subcommand)]
        mode: AssessCommand,
    },
    /// Generate synthetic transactions from a known model.
    Synth,
    /// Write the built-in assets and the toy commune.
    Export,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum AssessCommand {
    /// One development replacing existing structures.
    Single,
    /// Every building in turn gains floors.
    Regional,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub terrain: Option<PathBuf>,
    #[arg(long, global = true)]
    pub buildings: Option<PathBuf>,
    #[arg(long, global = true)]
    pub canopy: Option<PathBuf>,
    #[arg(long, global = true)]
    pub landcover: Option<PathBuf>,
    #[arg(long, global = true)]
    pub transactions: Option<PathBuf>,
    #[arg(long, global = true)]
    pub scorer: Option<PathBuf>,
    #[arg(long = "model", global = true)]
    pub hedonic_model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    #[arg(long, global = true)]
    pub massing: Option<PathBuf>,
    #[arg(long, global = true)]
    pub attributes: Option<PathBuf>,
    /// Output directory.
    #[arg(long = "out", global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n_floors: Option<u32>,
    /// Neighbours per up-zoning window.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Evaluation radius of a single development, metres.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Comma-separated ids replaced by the massing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub removed: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub agglomeration: Option<String>,
    /// Synthetic record count.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Synthetic log-price noise.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub n_azimuth: Option<u32>,
    #[arg(long, global = true)]
    pub n_elevation: Option<u32>,
}

impl Overrides {
    /// Flags win over the config file.
    pub fn apply(self, cfg: &mut RunConfig) {
        let p = &mut cfg.paths;
        for (slot, flag) in [
            (&mut p.terrain, self.terrain),
            (&mut p.buildings, self.buildings),
            (&mut p.canopy, self.canopy),
            (&mut p.landcover, self.landcover),
            (&mut p.transactions, self.transactions),
            (&mut p.scorer, self.scorer),
            (&mut p.hedonic_model, self.hedonic_model),
            (&mut p.registry, self.registry),
            (&mut p.massing, self.massing),
            (&mut p.attributes, self.attributes),
        ] {
            if flag.is_some() {
                *slot = flag;
            }
        }
        if let Some(v) = self.output_dir {
            cfg.output_dir = v;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        let s = &mut cfg.scenario;
        if let Some(v) = self.n_floors {
            s.n_floors = v;
        }
        if let Some(v) = self.k {
            s.k = v;
        }
        if let Some(v) = self.radius {
            s.radius = v;
        }
        if let Some(v) = self.removed {
            s.removed = v;
        }
        if self.agglomeration.is_some() {
            s.agglomeration = self.agglomeration;
        }
        if let Some(v) = self.n {
            cfg.synth.n = v;
        }
        if let Some(v) = self.sigma {
            cfg.synth.sigma = v;
        }
        if let Some(v) = self.n_azimuth {
            cfg.simulation.rays.n_azimuth = v;
        }
        if let Some(v) = self.n_elevation {
            cfg.simulation.rays.n_elevation = v;
        }
    }
}

/// Resolves the effective configuration of a parsed command line.
pub fn resolve_config(config: Option<PathBuf>, overrides: Overrides) -> Result<RunConfig> {
    let mut cfg = match config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg);
    Ok(cfg)
}

/// Produces the artifacts of one command.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    match command {
        Command::Build => build(cfg),
        Command::Simulate => simulate(cfg),
        Command::Fit => fit(cfg),
        Command::Appraise => appraise(cfg),
        Command::Assess { mode } => assess(
            cfg,
            match mode {
                AssessCommand::Single => AssessMode::Single,
                AssessCommand::Regional => AssessMode::Regional,
            },
        ),
        Command::Synth => synth(cfg),
        Command::Export => export(cfg),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve_config(cli.config, cli.overrides).and_then(|cfg| {
        let artifacts = execute(&cli.command, &cfg)?;
        write_artifacts(&cfg.output_dir, &artifacts)
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
