use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zodiac_lab::cli::{cmd_export_lexicon, cmd_generate, cmd_run, RunOptions};

#[derive(Parser)]
#[command(name = "zodiac-lab", version, about = "Zodiac/personality prediction experiments on synthetic data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic population CSV plus a config sidecar.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long, default_value = "population.csv")]
        out: PathBuf,
        /// Overrides the generation seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the full experiment and write the report files.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides `output_directory`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of logreg,forest,mlp.
        #[arg(long)]
        models: Option<String>,
        /// Also write the standardized feature matrices.
        #[arg(long)]
        dump_features: bool,
        /// Save each final model as JSON into this directory.
        #[arg(long)]
        save_models: Option<PathBuf>,
        /// Overrides both the generation and the experiment seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the trait lexicon and sign assignments as JSON.
    ExportLexicon {
        #[arg(long, default_value = "lexicon.json")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = match Cli::parse().command {
        Command::Generate { config, out, seed } => cmd_generate(config.as_deref(), &out, seed),
        Command::Run {
            config,
            out,
            models,
            dump_features,
            save_models,
            seed,
        } => cmd_run(&RunOptions {
            config,
            out,
            models,
            dump_features,
            save_models,
            seed,
        })
        .map(|_| ()),
        Command::ExportLexicon { out } => cmd_export_lexicon(&out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
