//! Command-line front end for the `rcdensity` pipeline.
//!
//! Exit codes: 0 success, 2 input or I/O error, 3 annotation validation
//! error (every offending record is listed), 4 internal error.

pub mod commands;
pub mod config;
mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    analyze, cmd_analyze, cmd_chi2, cmd_givenness, cmd_surprisal, cmd_train, Bundle, TrainReport,
};
pub use config::{ConfigArgs, CorpusFormat, Counting, RunConfig, Unit};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "rcdensity",
    version,
    about = "Surprisal and givenness measurements for relative-clause placement"
)]
pub struct Cli {
    /// Flat `key = value` configuration file; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a Kneser-Ney bigram model and write it as ARPA.
    Train {
        #[command(flatten)]
        args: ConfigArgs,
        /// Model file to write (default: <out-dir>/model.arpa).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Per-token surprisal with accommodation weights, as TSV.
    Surprisal {
        #[command(flatten)]
        args: ConfigArgs,
        /// Document to annotate; repeatable. All documents when omitted.
        #[arg(long = "doc", value_name = "ID")]
        docs: Vec<String>,
        /// Write here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Full clause analysis: writes the report bundle into the output directory.
    Analyze {
        #[command(flatten)]
        args: ConfigArgs,
        /// Also print the tables aligned for reading.
        #[arg(long)]
        pretty: bool,
    },
    /// Classify referent mentions, or summarize them per clause when
    /// clause annotations are given.
    Givenness {
        #[command(flatten)]
        args: ConfigArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
    /// Chi-square test on the 2x2 table [[A, B], [C, D]].
    Chi2 { a: u64, b: u64, c: u64, d: u64 },
}

fn resolve(config: Option<&PathBuf>, args: &ConfigArgs) -> CliResult<RunConfig> {
    let file = match config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    RunConfig::resolve(file.as_deref(), args)
}

fn emit(text: &str, output: Option<&PathBuf>) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

/// Runs a parsed command line, printing results to standard output.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let config = cli.config.as_ref();
    match &cli.command {
        Command::Train { args, output } => {
            let cfg = resolve(config, args)?;
            let path = output
                .clone()
                .unwrap_or_else(|| cfg.out_dir.join("model.arpa"));
            let report = cmd_train(&cfg, &path)?;
            println!("{report}");
        }
        Command::Surprisal { args, docs, output } => {
            let cfg = resolve(config, args)?;
            emit(&cmd_surprisal(&cfg, docs)?, output.as_ref())?;
        }
        Command::Analyze { args, pretty } => {
            let cfg = resolve(config, args)?;
            let bundle = cmd_analyze(&cfg)?;
            if *pretty {
                for (name, contents) in bundle.files.iter().filter(|(n, _)| n.ends_with(".tsv")) {
                    if name != "metrics.tsv" {
                        println!("{name}\n{}", report::align(contents));
                    }
                }
            }
            eprintln!(
                "wrote {} files to {}",
                bundle.files.len(),
                cfg.out_dir.display()
            );
        }
        Command::Givenness {
            args,
            output,
            pretty,
        } => {
            let cfg = resolve(config, args)?;
            let text = cmd_givenness(&cfg)?;
            let text = if *pretty { report::align(&text) } else { text };
            emit(&text, output.as_ref())?;
        }
        Command::Chi2 { a, b, c, d } => emit(&cmd_chi2(*a, *b, *c, *d)?, None)?,
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
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
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
