//! Command-line front end: subcommands over one config file, with
//! reproducible artifacts and per-stage manifests.
//!
//! Exit codes: 0 success, 1 domain or I/O failure, 2 configuration
//! problems (including unusable arguments).

mod config;
mod manifest;
mod stages;

pub use config::{
    AlignmentConfig, AnalyticsConfig, EmbeddingConfig, LoadedConfig, PathsConfig, RunConfig,
};
pub use manifest::{derive_seed, file_sha256, hex_digest, RunManifest};
pub use stages::{
    run_align, run_embed, run_ingest, run_mine, run_pipeline, run_report, run_sentiment,
    run_series, MinedArtifact, PairContexts, Report, ReportMeta, ReportMisaligned, SentimentRow,
    StageContext,
};

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::Result;

#[derive(Debug, Parser)]
#[command(
    name = "newspolar",
    version,
    about = "Partisan news-corpus comparison: sentiment and offensive-speech series, \
             aligned embeddings, misaligned-pair mining"
)]
struct Cli {
    /// Path to the run configuration.
    #[arg(long, global = true, default_value = "config.toml")]
    config: PathBuf,

    /// Override the config's top-level seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the config's worker count.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Suppress progress notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Normalized-output mode: omit timestamps and timings so re-runs
    /// are byte-identical.
    #[arg(long, global = true)]
    normalized: bool,

    /// Override the alignment direction (left-to-right or right-to-left).
    #[arg(long, global = true)]
    direction: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Filter and store the document collection.
    Ingest,
    /// Score stored documents with the sentiment lexicon.
    Sentiment,
    /// Train embeddings for the source and target buckets.
    Embed,
    /// Fit the orthogonal transform from the seed lexicon.
    Align,
    /// Translate the source vocabulary and rank misaligned pairs.
    Mine,
    /// Build monthly series with interpolation and smoothing.
    Series,
    /// Assemble the run summary.
    Report,
    /// Run every stage in order.
    Pipeline,
    /// Check the config and inputs without writing artifacts.
    ValidateConfig,
}

fn build_context(cli: &Cli) -> Result<StageContext> {
    let loaded = RunConfig::load(&cli.config)?;
    let mut config = loaded.config;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    if cli.normalized {
        config.normalized = true;
    }
    if let Some(direction) = &cli.direction {
        config.alignment.direction = direction.clone();
    }
    config.validate()?;
    Ok(StageContext {
        config,
        config_hash: loaded.config_hash,
        quiet: cli.quiet,
    })
}

fn dispatch(cli: &Cli) -> Result<()> {
    let ctx = build_context(cli)?;
    match cli.command {
        Command::Ingest => run_ingest(&ctx),
        Command::Sentiment => run_sentiment(&ctx),
        Command::Embed => run_embed(&ctx),
        Command::Align => run_align(&ctx),
        Command::Mine => run_mine(&ctx),
        Command::Series => run_series(&ctx),
        Command::Report => run_report(&ctx),
        Command::Pipeline => run_pipeline(&ctx),
        Command::ValidateConfig => {
            if !cli.quiet {
                eprintln!("config ok: {}", cli.config.display());
            }
            Ok(())
        }
    }
}

/// Parse arguments (including the program name) and run. Returns the
/// process exit code instead of exiting, so tests can drive it.
pub fn run_command(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    2
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        std::iter::once("newspolar")
            .chain(list.iter().copied())
            .map(str::to_string)
            .collect()
    }

    #[test]
    fn unknown_subcommand_exits_two() {
        assert_eq!(run_command(&args(&["frobnicate"])), 2);
    }

    #[test]
    fn missing_subcommand_exits_two() {
        assert_eq!(run_command(&args(&[])), 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_command(&args(&["--help"])), 0);
    }

    #[test]
    fn missing_config_exits_two() {
        // The config path is valid syntax but the file is absent.
        assert_eq!(
            run_command(&args(&["validate-config", "--config", "/nonexistent/c.toml"])),
            2
        );
    }
}
