use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use netentropy::experiments::{self, ExperimentConfig, ExperimentKind};
use netentropy::network::DuplicatePolicy;

/// Entropy dynamics of quantum states on random tight-binding networks.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free expansion of a confined state on one network.
    Expand(Common),
    /// Free expansion repeated over independent networks.
    Multiconfig(Common),
    /// Free expansion for several confinement sizes.
    NinitSweep(Common),
    /// Entropy statistics of random superpositions of energy eigenstates.
    RaseeStats(Common),
    /// Time evolution of random energy superpositions.
    RaseeDynamics(Common),
    /// Time-reversed expansion perturbed by a small random admixture.
    Blip(Common),
    /// Canonical ensemble over a temperature grid.
    Thermal(Common),
    /// Repeat the run recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        /// Output directory (defaults to the recorded one).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for cached spectra.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Number of sites.
    #[arg(long)]
    n: Option<usize>,
    /// Sites in the initial confinement.
    #[arg(long)]
    n_init: Option<usize>,
    /// Connection passes per site.
    #[arg(long)]
    passes: Option<usize>,
    /// Nearest-neighbour pool drawn from on each pass.
    #[arg(long)]
    pool_size: Option<usize>,
    /// What to do when a pass draws an existing bond.
    #[arg(long, value_enum)]
    duplicates: Option<Duplicates>,
    /// Time horizon in units of tau.
    #[arg(long)]
    t_max: Option<f64>,
    /// Sampling interval in units of tau.
    #[arg(long)]
    t_step: Option<f64>,
    /// Networks averaged over (multiconfig).
    #[arg(long)]
    n_configs: Option<usize>,
    /// Samples per energy truncation (rasee-stats).
    #[arg(long)]
    n_samples: Option<usize>,
    /// Energy levels used by random energy superpositions.
    #[arg(long)]
    n_e: Option<usize>,
    /// Trajectories evolved (rasee-dynamics).
    #[arg(long)]
    n_trajectories: Option<usize>,
    /// Temperature of the reference Boltzmann distribution (expand).
    #[arg(long)]
    temperature: Option<f64>,
    /// Reversal time of the blip experiment, in units of tau.
    #[arg(long)]
    reversal_time: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Duplicates {
    Redraw,
    Skip,
}

impl Common {
    fn into_config(self, kind: ExperimentKind) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::for_experiment(kind),
        };
        cfg.experiment = kind;
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        set!(seed => master_seed, out => output_dir, n => n, n_init => n_init, passes => passes,
             pool_size => pool_size, t_max => t_max, t_step => t_step, n_configs => n_configs,
             n_samples => n_samples, n_trajectories => n_trajectories, reversal_time => reversal_time);
        if self.cache.is_some() {
            cfg.cache_dir = self.cache;
        }
        if self.n_e.is_some() {
            cfg.n_e = self.n_e;
        }
        if self.temperature.is_some() {
            cfg.boltzmann_temperature = self.temperature;
        }
        if let Some(d) = self.duplicates {
            cfg.duplicate_policy = match d {
                Duplicates::Redraw => DuplicatePolicy::Redraw,
                Duplicates::Skip => DuplicatePolicy::Skip,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let (kind, common) = match cli.command {
        Command::Expand(c) => (ExperimentKind::Expand, c),
        Command::Multiconfig(c) => (ExperimentKind::Multiconfig, c),
        Command::NinitSweep(c) => (ExperimentKind::NinitSweep, c),
        Command::RaseeStats(c) => (ExperimentKind::RaseeStats, c),
        Command::RaseeDynamics(c) => (ExperimentKind::RaseeDynamics, c),
        Command::Blip(c) => (ExperimentKind::Blip, c),
        Command::Thermal(c) => (ExperimentKind::Thermal, c),
        Command::Rerun { manifest, out } => {
            let m = experiments::rerun_from_manifest(&manifest, out)
                .with_context(|| format!("rerunning {}", manifest.display()))?;
            println!(
                "{}: {} files in {}",
                m.experiment,
                m.outputs.len(),
                m.config.output_dir.display()
            );
            return Ok(());
        }
    };
    let cfg = common.into_config(kind)?;
    let m = experiments::run(&cfg).with_context(|| format!("running {}", kind.name()))?;
    println!(
        "{}: {} files in {} ({:.1} s)",
        m.experiment,
        m.outputs.len(),
        cfg.output_dir.display(),
        m.wall_clock_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
