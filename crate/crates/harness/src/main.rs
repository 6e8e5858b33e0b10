use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use nlac_harness::{execute, ExperimentConfig, ExperimentKind, HarnessError, OutputDir};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Run,
    ConvergenceTime,
    ConvergenceSpace,
    ConvergenceDelta,
    Stability,
    Bubble,
    Coeffs,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Run => ExperimentKind::Run,
            Command::ConvergenceTime => ExperimentKind::ConvergenceTime,
            Command::ConvergenceSpace => ExperimentKind::ConvergenceSpace,
            Command::ConvergenceDelta => ExperimentKind::ConvergenceDelta,
            Command::Stability => ExperimentKind::Stability,
            Command::Bubble => ExperimentKind::Bubble,
            Command::Coeffs => ExperimentKind::Coeffs,
        }
    }
}

/// Nonlocal Allen-Cahn experiments on periodic 2D grids.
#[derive(Debug, Parser)]
#[command(name = "nlac", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Command,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for random initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override a configuration key, e.g. `--set n=256`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let kind = cli.experiment.into();
    let mut config = match &cli.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            ExperimentConfig::from_text(kind, &text)?
        }
        None => ExperimentConfig::defaults(kind),
    };
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| HarnessError::Usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
        config.set(key.trim(), value.trim()).map_err(|m| HarnessError::Usage(format!("--set {item}: {m}")))?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("nlac: {e}");
            return ExitCode::from(2);
        }
    }
    let result = load(&cli).and_then(|config| {
        let out = OutputDir::create(&cli.out)?;
        execute(&config, &out)
    });
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nlac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
