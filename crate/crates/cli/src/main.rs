//! `incparse`: batch front end for the codecs, oracle, models and scorer.
//!
//! Exit status: 0 on success, 1 for bad input or flags, 2 when an internal
//! invariant is violated (e.g. a round trip that should be exact is not).

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use incparse::incremental_model::DecoderKind;
use incparse::sl_codec::SlMode;

/// Marks an error as a broken internal invariant (exit status 2).
#[derive(Debug)]
pub struct Internal(pub String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal invariant violated: {}", self.0)
    }
}

impl std::error::Error for Internal {}

#[derive(Parser)]
#[command(name = "incparse", version, about = "Incremental constituency parsing toolkit")]
struct Cli {
    /// Worker threads for per-sentence parallel work (parse, eval).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct TreeInput {
    /// Bracketed treebank; `-` reads stdin.
    pub input: PathBuf,
    /// Join character for collapsed unary chains.
    #[arg(long, default_value_t = '+')]
    pub join: char,
    /// Move a complete preterminal layer into POS tags.
    #[arg(long)]
    pub strip_pos: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Treebank to label TSV.
    Encode {
        #[command(flatten)]
        trees: TreeInput,
        #[arg(long, default_value_t = SlMode::Absolute)]
        mode: SlMode,
    },
    /// Label TSV to treebank.
    Decode {
        input: PathBuf,
        #[arg(long, default_value_t = SlMode::Absolute)]
        mode: SlMode,
        #[arg(long, default_value_t = '+')]
        join: char,
    },
    /// Treebank to action log.
    Oracle {
        #[command(flatten)]
        trees: TreeInput,
    },
    /// Action log to treebank.
    Replay {
        input: PathBuf,
        #[arg(long, default_value_t = '+')]
        join: char,
    },
    /// Train a decoder and write a model file.
    Train {
        #[command(flatten)]
        trees: TreeInput,
        #[arg(long, default_value_t = DecoderKind::Sl)]
        decoder: DecoderKind,
        #[arg(long, default_value_t = SlMode::Absolute)]
        mode: SlMode,
        /// Lookahead tokens.
        #[arg(long, default_value_t = 1)]
        delay: usize,
        /// Permit delays above 2.
        #[arg(long)]
        allow_large_delay: bool,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parse tokenized sentences (one per line) with a trained model.
    Parse {
        #[arg(long)]
        model: PathBuf,
        input: PathBuf,
        /// Input is a treebank; its sentences are re-parsed.
        #[arg(long)]
        from_trees: bool,
        #[arg(long)]
        strip_pos: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Labeled bracketing scores of predicted trees against gold trees.
    Eval {
        gold: PathBuf,
        pred: PathBuf,
        /// evalb-style parameter file (DELETE_LABEL, EQ_LABEL).
        #[arg(long)]
        prm: Option<PathBuf>,
        /// Use the bundled COLLINS-like parameters.
        #[arg(long, conflicts_with = "prm")]
        collins: bool,
        /// Compare labels including functional tags.
        #[arg(long)]
        keep_functional: bool,
        #[arg(long, default_value_t = '+')]
        join: char,
        #[arg(long)]
        json: bool,
    },
    /// Per-label frequency and average span length.
    Stats {
        input: PathBuf,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Check that a model's decisions never depend on tokens past its delay.
    Audit {
        #[arg(long, required_unless_present = "adversarial")]
        model: Option<PathBuf>,
        /// Audit the planted last-token-peeking predictor instead.
        #[arg(long)]
        adversarial: bool,
        /// Delay to audit against (defaults to the model's).
        #[arg(long)]
        delay: Option<usize>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.jobs == 0 {
        anyhow::bail!("--jobs must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global()?;
    match cli.command {
        Command::Encode { trees, mode } => commands::encode(&trees, mode),
        Command::Decode { input, mode, join } => commands::decode(&input, mode, join),
        Command::Oracle { trees } => commands::oracle(&trees),
        Command::Replay { input, join } => commands::replay(&input, join),
        Command::Train { trees, decoder, mode, delay, allow_large_delay, epochs, seed, output } => {
            commands::train(&trees, decoder, mode, delay, allow_large_delay, epochs, seed, output.as_deref())
        }
        Command::Parse { model, input, from_trees, strip_pos, output } => {
            commands::parse(&model, &input, from_trees, strip_pos, output.as_deref())
        }
        Command::Eval { gold, pred, prm, collins, keep_functional, join, json } => {
            commands::eval(&gold, &pred, prm.as_deref(), collins, keep_functional, join, json)
        }
        Command::Stats { input, top, json } => commands::stats(&input, top, json),
        Command::Audit { model, adversarial, delay, pairs, seed, json } => {
            commands::audit(model.as_deref(), adversarial, delay, pairs, seed, json)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(io) = e.downcast_ref::<std::io::Error>() {
                if io.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
            }
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Internal>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
