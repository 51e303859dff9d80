use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaplab::config::Experiment;
use gaplab::{parse_config, report, run, CliError};

#[derive(Parser)]
#[command(name = "gaplab", version, about = "Random matrix gap and anti-concentration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample matrices and record their spectra.
    Sample(RunArgs),
    /// Gap tail probabilities over a delta grid.
    Tails(RunArgs),
    /// Minimum eigenvalue gaps.
    Mingap(RunArgs),
    /// Simple-spectrum frequency.
    Simple(RunArgs),
    /// Least common denominators of a vector corpus.
    Lcd(RunArgs),
    /// Small-ball probabilities of a vector corpus.
    Smallball(RunArgs),
    /// Nodal domains of random graph eigenvectors.
    Nodal(RunArgs),
    /// Smoothed power iteration.
    Power(RunArgs),
    /// Summarize a finished run directory.
    Report {
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Io {
        path: args.config.clone(),
        source: e,
    })?;
    let mut config = parse_config(&text, Some(experiment))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.output {
        config.output = out.to_string_lossy().into_owned();
    }
    let outcome = run(&config)?;
    for o in &outcome.outputs {
        println!("{} ({} rows)", outcome.output_dir.join(&o.file).display(), o.rows);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => execute(Experiment::Sample, a),
        Command::Tails(a) => execute(Experiment::Tails, a),
        Command::Mingap(a) => execute(Experiment::Mingap, a),
        Command::Simple(a) => execute(Experiment::Simple, a),
        Command::Lcd(a) => execute(Experiment::Lcd, a),
        Command::Smallball(a) => execute(Experiment::Smallball, a),
        Command::Nodal(a) => execute(Experiment::Nodal, a),
        Command::Power(a) => execute(Experiment::Power, a),
        Command::Report { dir } => report(&dir).map(|r| print!("{}", r.text)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
