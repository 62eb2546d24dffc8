use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use reviewsignal::report::render_topics;
use reviewsignal::{pipeline, PipelineConfig};

/// Predict health-inspection outcomes from restaurant reviews.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-validate the configured methods and write the report files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a synthetic review, inspection and link dataset.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a topic model on the whole corpus and print its top words.
    Topics {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &PathBuf, seed: Option<u64>) -> reviewsignal::Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, seed } => {
            let cfg = load(&config, seed)?;
            let outcome = pipeline::run(&cfg)?;
            for path in &outcome.files {
                info!("wrote {}", path.display());
            }
            let summary = reviewsignal::report::render_summary_txt(&outcome.report.methods);
            print!("{summary}");
        }
        Command::Synth { config, out } => {
            let cfg = load(&config, None)?;
            let n = pipeline::synth(&cfg, &out)?;
            println!("wrote {n} reviews to {}", out.display());
        }
        Command::Topics { config } => {
            let cfg = load(&config, None)?;
            let (topics, written) = pipeline::topics(&cfg)?;
            if let Some(path) = written {
                info!("wrote {}", path.display());
            }
            print!("{}", render_topics(&topics));
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.downcast_ref::<reviewsignal::Error>()
        .map(|e| e.exit_code() as u8)
        .unwrap_or(1)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
