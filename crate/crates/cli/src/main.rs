//! `citebias`: measure group imbalance in a citation network against
//! random, homophilic and preferential reference models.

mod archive;
mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use citebias::refmodels::DEFAULT_TIE_EPS;

#[derive(Parser)]
#[command(name = "citebias", version, about = "Citation imbalance against reference models")]
struct Cli {
    /// Seed for bootstrap resampling and synthetic generation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = "CITEBIAS_OUTPUT_DIR", default_value = ".")]
    output_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter raw paper and citation tables into a network archive.
    Ingest(IngestArgs),
    /// Compute expected citations under a reference model.
    Model(ModelArgs),
    /// Over/under-citation per gender category with bootstrap intervals.
    Imbalance(ImbalanceArgs),
    /// Rankings by citations or PageRank and top-d% W|W share curves.
    Rank(RankArgs),
    /// Generate a synthetic corpus from a key = value config file.
    Synth(SynthArgs),
    /// Structural comparison between a network and a model.
    Report(ReportArgs),
    /// Match publication records across two record tables.
    Match(MatchArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    pub papers: PathBuf,
    pub citations: PathBuf,
    #[arg(long, default_value = "network")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ModelArgs {
    pub archive: PathBuf,
    /// rd, hd or pd.
    #[arg(long)]
    pub model: String,
    /// Comma-separated subset of rank,country,topic (default: all three).
    #[arg(long)]
    pub attrs: Option<String>,
    /// Exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Tolerance for equal running expectations in pd (floating point only).
    #[arg(long = "eps", default_value_t = DEFAULT_TIE_EPS)]
    pub tie_eps: f64,
    /// Also write every contribution group to groups.tsv.
    #[arg(long)]
    pub dump_groups: bool,
    /// Defaults to model-<kind>.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StratifyArg {
    None,
    Rank,
    Subfield,
}

impl StratifyArg {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Rank => "rank",
            Self::Subfield => "subfield",
        }
    }
}

#[derive(Args)]
pub struct ImbalanceArgs {
    pub archive: PathBuf,
    pub model_dir: PathBuf,
    /// Citing papers, e.g. `gender=WW` or `rank=A*,year=2015`.
    #[arg(long, default_value = "all")]
    pub from: String,
    /// Cited papers.
    #[arg(long, default_value = "all")]
    pub to: String,
    /// Bootstrap resamples; 0 disables intervals.
    #[arg(long, default_value_t = 500)]
    pub bootstrap: usize,
    #[arg(long, value_enum, default_value = "none")]
    pub stratify: StratifyArg,
    #[arg(long, default_value = "imbalance")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RankArgs {
    pub archive: PathBuf,
    /// Model artifact(s) to rank under; repeatable.
    #[arg(long)]
    pub model_dir: Vec<PathBuf>,
    /// citations or pagerank.
    #[arg(long, default_value = "citations")]
    pub metric: String,
    /// Percentages in (0, 100].
    #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
    pub d_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 100)]
    pub t_max: usize,
    #[arg(long, default_value = "ranking")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SynthArgs {
    pub config: PathBuf,
    #[arg(long, default_value = "synth")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReportArgs {
    pub archive: PathBuf,
    pub model_dir: PathBuf,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct MatchArgs {
    pub left: PathBuf,
    pub right: PathBuf,
    #[arg(long, default_value = "matches")]
    pub out: PathBuf,
}

pub struct Context {
    pub seed: Option<u64>,
    output_dir: PathBuf,
}

impl Context {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.output_dir.join(path)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = Context {
        seed: cli.seed,
        output_dir: cli.output_dir,
    };
    match &cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, a),
        Command::Model(a) => commands::model(&ctx, a),
        Command::Imbalance(a) => commands::imbalance(&ctx, a),
        Command::Rank(a) => commands::rank(&ctx, a),
        Command::Synth(a) => commands::synth(&ctx, a),
        Command::Report(a) => commands::report(&ctx, a),
        Command::Match(a) => commands::match_cmd(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
