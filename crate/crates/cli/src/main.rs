use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaussian_work::harness::{run, Command, ExperimentConfig};
use gaussian_work::Error;

#[derive(Parser)]
#[command(name = "gaussian-work", version, about = "Gaussian extractable work of random energy-bounded states")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One CSV row (or JSON record) per sample at a single mode count.
    Sample(Flags),
    /// Per-n aggregates, tail fractions and the fitted Delta exponent.
    Sweep(Flags),
    /// Monte Carlo moments of the reduced covariance against closed forms.
    Moments(Flags),
    /// Invariant suite, or a check of one covariance file with --input.
    Validate(Flags),
    /// Purify the covariance matrix in --input.
    Purify(Flags),
}

#[derive(Args)]
struct Flags {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated, strictly increasing.
    #[arg(long = "n-grid")]
    n_grid: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// vacuum | uniform:<z0> | power:<beta> | flat:<E> | file:<path>
    #[arg(long = "z-profile")]
    z_profile: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated thresholds for the tail fractions.
    #[arg(long)]
    epsilon: Option<String>,
    /// direct | purified
    #[arg(long)]
    pipeline: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Covariance file for validate and purify.
    #[arg(long)]
    input: Option<String>,
}

impl Flags {
    fn into_config(self) -> Result<ExperimentConfig, Error> {
        let mut config = ExperimentConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        let pairs = [
            ("n", self.n),
            ("n-grid", self.n_grid),
            ("m", self.m),
            ("z-profile", self.z_profile),
            ("samples", self.samples),
            ("seed", self.seed),
            ("epsilon", self.epsilon),
            ("pipeline", self.pipeline),
            ("threads", self.threads),
            ("out", self.out),
            ("format", self.format),
            ("input", self.input),
        ];
        for (key, value) in pairs {
            if let Some(value) = value {
                config.set(key, &value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Sample(f) => (Command::Sample, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
        Cmd::Moments(f) => (Command::Moments, f),
        Cmd::Validate(f) => (Command::Validate, f),
        Cmd::Purify(f) => (Command::Purify, f),
    };
    let result = flags.into_config().and_then(|config| run(command, &config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Error::Sample { index, .. } = &e {
                eprintln!("failing sample_index: {index}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
