use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ratchet_cli::presets::{self, PRESETS};
use ratchet_cli::{resume, run, CliError, ExperimentConfig, Outcome, RunOptions, OUT_ENV};

#[derive(Parser)]
#[command(name = "ratchet", version, about = "Classical and quantum dissipative ratchet experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root; falls back to $RATCHET_OUT, then ./out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Stop each quantum job after this many periods, leaving a checkpoint.
    #[arg(long, global = true, value_name = "PERIODS")]
    period_budget: Option<u64>,
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a preset by name.
    Run { config: String },
    /// Continue a quantum job from its checkpoint.
    Resume { checkpoint: PathBuf, config: String },
    /// Parse and check a config without running it.
    Validate { config: String },
    /// Bundled configs with their tier and expected runtime.
    ListPresets,
}

/// A path if one exists, otherwise a preset name.
fn load(config: &str) -> Result<ExperimentConfig, CliError> {
    let path = Path::new(config);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return ExperimentConfig::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            e => e,
        });
    }
    match presets::find(config) {
        Some(p) => p.config(),
        None => Err(CliError::Io(format!("{config}: no such file or preset"))),
    }
}

fn options(cli: &Cli) -> RunOptions {
    let out_root = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    RunOptions { out_root, period_budget: cli.period_budget, quiet: cli.quiet }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("--workers: {e}")))?;
    }
    let with_seed = |mut c: ExperimentConfig| {
        if let Some(s) = cli.seed {
            c.params.seed = s;
        }
        c
    };
    let opts = options(cli);
    let report = |outcome: Outcome, c: &ExperimentConfig| {
        let dir = opts.out_root.join(&c.output);
        match outcome {
            Outcome::Complete => println!("complete: {}", dir.display()),
            Outcome::Incomplete => println!("incomplete: {} (resume from {}/checkpoints)", dir.display(), dir.display()),
            Outcome::AlreadyComplete => println!("already complete: {}", dir.display()),
        }
    };
    match &cli.command {
        Command::Run { config } => {
            let c = with_seed(load(config)?);
            let outcome = run(&c, &opts)?;
            report(outcome, &c);
        }
        Command::Resume { checkpoint, config } => {
            let c = with_seed(load(config)?);
            let outcome = resume(checkpoint, &c, &opts)?;
            report(outcome, &c);
        }
        Command::Validate { config } => {
            let c = load(config)?;
            println!("ok: {} {} ({})", engine_name(&c), c.experiment, c.output);
        }
        Command::ListPresets => {
            for p in PRESETS {
                let c = p.config()?;
                let tier = format!("{:?}", c.tier).to_lowercase();
                println!("{:<16} {:<9} {:<52} {}", p.name, tier, c.runtime.as_deref().unwrap_or("-"), c.description);
            }
        }
    }
    Ok(())
}

fn engine_name(c: &ExperimentConfig) -> &'static str {
    match c.engine {
        ratchet_cli::config::Engine::Classical => "classical",
        ratchet_cli::config::Engine::Quantum => "quantum",
        ratchet_cli::config::Engine::Both => "classical+quantum",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ratchet: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
