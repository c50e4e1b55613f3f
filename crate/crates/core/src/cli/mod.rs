//! Command-line front end.
//!
//! Settings come from three layers, highest priority first: command-line
//! flags, a JSON config file (`--config`, unknown keys rejected), and
//! built-in per-subcommand defaults. The seed additionally falls back to the
//! `DENSECAP_SEED` environment variable before the built-in default.

mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{check_rank, EnvelopeFamily};
use crate::measures::ScenarioKind;
use crate::preprocess::{ActingSet, GammaMode, MeritSettings, SearchBudget};

pub use run::execute;

/// Environment variable consulted for the seed when neither flag nor config sets it.
pub const SEED_ENV: &str = "DENSECAP_SEED";

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "densecap", version, about = "Dense coding capacity and teleportation fidelity of random multiqubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Capacity statistics, optionally with POVM pre-processing merits.
    Dcc,
    /// Teleportation-fidelity statistics of two-qubit states.
    Tf,
    /// Capacity against negativity for random states and envelope curves.
    Envelope,
    /// Random sweep of the two-qubit rank-2 family against its bounds.
    Theorem1,
    /// Random sweep of the three-qubit rank-2 family against the gGHZ bound.
    Theorem2,
    /// Predicted and sampled mean capacity of two-qubit states.
    Meandcc,
    /// Eigenvalue-gap conditions after optimal pre-processing.
    Propcheck,
    /// Envelope bounds after POVM pre-processing.
    #[command(name = "postpovm-bound")]
    PostpovmBound,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dcc => "dcc",
            Command::Tf => "tf",
            Command::Envelope => "envelope",
            Command::Theorem1 => "theorem1",
            Command::Theorem2 => "theorem2",
            Command::Meandcc => "meandcc",
            Command::Propcheck => "propcheck",
            Command::PostpovmBound => "postpovm-bound",
        }
    }
}

/// Flags shared by all subcommands; each may also appear after the subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Communication scenario: 1s1r, 2s1r or 2s2r.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Ranks to sample, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub rank: Option<Vec<usize>>,
    /// Samples per rank.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Master seed (falls back to the config file, then DENSECAP_SEED, then 1).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Parties applying POVMs: none, sender, receiver, both (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub acting: Option<Vec<String>>,
    /// Merits shown in the summary: O, A1, A2 or all.
    #[arg(long, global = true)]
    pub merit: Option<String>,
    /// Optimizer starts per search (including the trivial-POVM seed point).
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Nelder–Mead iterations per start.
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Convergence tolerance on the merit.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// POVM bias: free (optimized) or zero.
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Parent directory for run outputs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with default values for any of these flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Parameter draws for theorem sweeps.
    #[arg(long, global = true)]
    pub sweeps: Option<usize>,
    /// Points per envelope curve.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
}

/// Contents of a `--config` file. Every key is optional; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub rank: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub acting: Option<Vec<String>>,
    pub merit: Option<String>,
    pub starts: Option<usize>,
    pub iters: Option<usize>,
    pub tol: Option<f64>,
    pub gamma: Option<String>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub sweeps: Option<usize>,
    pub grid: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))
    }
}

/// Which merits the human-readable summary shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeritChoice {
    #[serde(rename = "O")]
    O,
    #[serde(rename = "A1")]
    A1,
    #[serde(rename = "A2")]
    A2,
    #[serde(rename = "all")]
    All,
}

impl MeritChoice {
    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "O" | "o" => Ok(MeritChoice::O),
            "A1" | "a1" => Ok(MeritChoice::A1),
            "A2" | "a2" => Ok(MeritChoice::A2),
            "all" | "ALL" => Ok(MeritChoice::All),
            other => Err(Error::Config(format!("unknown merit '{other}' (expected O, A1, A2 or all)"))),
        }
    }
}

/// Where the seed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Flag,
    Config,
    Env,
    Default,
}

/// Fully resolved and validated settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Command,
    pub scenario: ScenarioKind,
    pub ranks: Vec<usize>,
    pub n_samples: usize,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub acting_sets: Vec<ActingSet>,
    pub merit: MeritChoice,
    pub starts: usize,
    pub iters: usize,
    pub tol: f64,
    pub gamma: GammaMode,
    pub workers: usize,
    pub out: PathBuf,
    pub sweeps: usize,
    pub grid: usize,
    pub quiet: bool,
}

impl RunConfig {
    pub fn merit_settings(&self) -> MeritSettings {
        MeritSettings {
            budget: SearchBudget { starts: self.starts, max_iters: self.iters, tol: self.tol },
            gamma_mode: self.gamma,
        }
    }

    pub fn envelope_family(&self) -> EnvelopeFamily {
        match self.scenario {
            ScenarioKind::TwoSendersOneReceiver => EnvelopeFamily::ThreeQubit,
            _ => EnvelopeFamily::TwoQubit,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Merge flags over the config file over defaults, and validate.
pub fn resolve(command: Command, flags: &Flags, file: &ConfigFile, env_seed: Option<&str>) -> Result<RunConfig> {
    let scenario_label = flags.scenario.clone().or_else(|| file.scenario.clone());
    let scenario = match scenario_label {
        Some(s) => ScenarioKind::from_label(&s)?,
        None => ScenarioKind::OneSenderOneReceiver,
    };
    let acting_labels = flags.acting.clone().or_else(|| file.acting.clone());
    let acting_sets = match acting_labels {
        Some(v) => v.iter().map(|s| ActingSet::from_label(s)).collect::<Result<Vec<_>>>()?,
        None => match command {
            Command::Propcheck => vec![ActingSet::Receiver],
            Command::PostpovmBound => vec![ActingSet::Both],
            _ => vec![ActingSet::None],
        },
    };
    let optimizing = acting_sets.iter().any(|&a| a != ActingSet::None);

    let default_ranks: Vec<usize> = match command {
        Command::Dcc => (1..=crate::experiments::max_rank(scenario)).collect(),
        Command::Tf => (1..=4).collect(),
        Command::Envelope => (1..=crate::experiments::max_rank(scenario)).collect(),
        Command::Meandcc => vec![2, 3, 4],
        Command::Propcheck | Command::PostpovmBound => vec![2],
        Command::Theorem1 | Command::Theorem2 => vec![2],
    };
    let ranks = flags.rank.clone().or_else(|| file.rank.clone()).unwrap_or(default_ranks);
    let default_n = match command {
        Command::Dcc | Command::Tf if optimizing => 5_000,
        Command::Dcc if scenario != ScenarioKind::OneSenderOneReceiver => 5_000,
        Command::Dcc | Command::Tf | Command::Meandcc => 10_000,
        Command::Envelope => 2_000,
        Command::Propcheck => 5_000,
        Command::PostpovmBound => 500,
        Command::Theorem1 | Command::Theorem2 => 0,
    };
    let n_samples = flags.n.or(file.n).unwrap_or(default_n);

    let (seed, seed_source) = if let Some(s) = flags.seed {
        (s, SeedSource::Flag)
    } else if let Some(s) = file.seed {
        (s, SeedSource::Config)
    } else if let Some(text) = env_seed {
        let s = text
            .trim()
            .parse::<u64>()
            .map_err(|_| usage(format!("{SEED_ENV}='{text}' is not an unsigned 64-bit integer")))?;
        (s, SeedSource::Env)
    } else {
        (DEFAULT_SEED, SeedSource::Default)
    };

    let merit = match flags.merit.clone().or_else(|| file.merit.clone()) {
        Some(m) => MeritChoice::from_label(&m)?,
        None => MeritChoice::All,
    };
    let budget = SearchBudget::default();
    let gamma = match flags.gamma.clone().or_else(|| file.gamma.clone()) {
        Some(g) => GammaMode::from_label(&g)?,
        None => GammaMode::Free,
    };
    let workers = flags
        .workers
        .or(file.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));

    let cfg = RunConfig {
        subcommand: command,
        scenario,
        ranks,
        n_samples,
        seed,
        seed_source,
        acting_sets,
        merit,
        starts: flags.starts.or(file.starts).unwrap_or(budget.starts),
        iters: flags.iters.or(file.iters).unwrap_or(budget.max_iters),
        tol: flags.tol.or(file.tol).unwrap_or(budget.tol),
        gamma,
        workers,
        out: flags.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("results")),
        sweeps: flags.sweeps.or(file.sweeps).unwrap_or(100_000),
        grid: flags.grid.or(file.grid).unwrap_or(201),
        quiet: flags.quiet,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    if cfg.starts == 0 || cfg.iters == 0 {
        return Err(usage("--starts and --iters must be at least 1"));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(usage("--tol must be positive and finite"));
    }
    match cfg.subcommand {
        Command::Theorem1 | Command::Theorem2 => {
            if cfg.sweeps == 0 {
                return Err(usage("--sweeps must be at least 1"));
            }
            return Ok(());
        }
        _ => {
            if cfg.n_samples == 0 {
                return Err(usage("--n must be at least 1"));
            }
            if cfg.ranks.is_empty() {
                return Err(usage("--rank needs at least one value"));
            }
        }
    }
    let two_qubit_only = matches!(cfg.subcommand, Command::Tf | Command::Meandcc | Command::Propcheck);
    if two_qubit_only && cfg.scenario != ScenarioKind::OneSenderOneReceiver {
        return Err(usage(format!("{} is defined for two qubits (scenario 1s1r) only", cfg.subcommand.name())));
    }
    if matches!(cfg.subcommand, Command::Envelope | Command::PostpovmBound)
        && cfg.scenario == ScenarioKind::TwoSendersTwoReceivers
    {
        return Err(usage(format!("{} supports scenarios 1s1r and 2s1r", cfg.subcommand.name())));
    }
    if cfg.subcommand == Command::Envelope && cfg.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    if matches!(cfg.subcommand, Command::Propcheck | Command::PostpovmBound)
        && cfg.acting_sets.iter().all(|&a| a == ActingSet::None)
    {
        return Err(usage(format!("{} needs an acting set other than none", cfg.subcommand.name())));
    }
    for &r in &cfg.ranks {
        check_rank(cfg.scenario, r).map_err(|e| usage(format!("{}: {e}", cfg.subcommand.name())))?;
    }
    Ok(())
}

/// Parse `args`, run, and return the process exit status: 0 on success, 2
/// for usage and configuration errors, 1 for failures during the run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let file = match &cli.flags.config {
        Some(p) => match ConfigFile::load(p) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => ConfigFile::default(),
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = match resolve(cli.command, &cli.flags, &file, env_seed.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&cfg, &file) {
        Ok(dir) => {
            eprintln!("outputs written to {}", dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
