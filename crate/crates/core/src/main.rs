use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lineage::ingest::fetch::{DEFAULT_PAGE_SIZE, DEFAULT_TOKEN_ENV};
use lineage::ingest::FetchConfig;
use lineage::mutation::TraitKind;
use lineage::ordering::{Objective, TieRule};
use lineage::report::{self, checkpoint_path, FetchRequest, MetricSpec, RunConfig, RunOutcome, SelectionMode};
use lineage::sampling::PairUniverse;
use lineage::similarity::{IdfMode, NgramMode};
use lineage::Error;

/// Model family-tree and trait-evolution analytics over registry snapshots.
#[derive(Parser)]
#[command(name = "lineage", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution tables: licenses, tasks, languages, libraries, datasets,
    /// top models, arXiv categories and documentation flags.
    Summary(RunArgs),
    /// Genetic similarity estimates for every subtree pattern and role pair.
    Similarity(RunArgs),
    /// Drift graph, optimal ordering and stat box for one trait
    /// (license, language, task, library or tag:<prefix>).
    Drift {
        #[arg(value_name = "TRAIT")]
        trait_kind: TraitKind,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Per-tree size, depth and virality, plus growth of the largest trees.
    Graphstats(RunArgs),
    /// Card coverage, lengths and auto-generation markers.
    Cards(RunArgs),
    /// Download a snapshot (and optionally cards) from a registry.
    Fetch(FetchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// NDJSON snapshot.
    #[arg(long)]
    snapshot: PathBuf,
    /// Card store: a directory of <id>.md files or an archive with an .idx sidecar.
    #[arg(long)]
    cards: Option<PathBuf>,
    #[arg(short, long, default_value = "out")]
    output_dir: PathBuf,
    /// Parsed-snapshot cache directory.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Required by `similarity`; also seeds the heuristic ordering solver.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    vocabulary_cap: Option<usize>,
    /// Draws per estimate.
    #[arg(short = 'k', long)]
    sample_size: Option<usize>,
    /// Trait values kept in the drift graph.
    #[arg(long)]
    top_k: Option<usize>,
    /// Rows in summary tables and trees with growth series.
    #[arg(long)]
    top_n: Option<usize>,
    /// Largest drift graph ordered exactly.
    #[arg(long)]
    exact_cap: Option<usize>,
    /// Metrics as kind-source, e.g. tfidf-metadata,levenshtein-card.
    #[arg(long = "metric", value_delimiter = ',')]
    metrics: Vec<MetricSpec>,
    /// drift or mutation.
    #[arg(long)]
    objective: Option<Objective>,
    /// oriented or neither.
    #[arg(long)]
    tie_rule: Option<TieRule>,
    /// all or family.
    #[arg(long)]
    pair_universe: Option<PairUniverse>,
    /// literal or log-smoothed.
    #[arg(long)]
    idf: Option<IdfMode>,
    /// unigram, bigram or both.
    #[arg(long)]
    ngrams: Option<NgramMode>,
    /// traffic or frequency.
    #[arg(long)]
    node_selection: Option<SelectionMode>,
    /// Edit distance input cap in characters.
    #[arg(long)]
    max_chars: Option<usize>,
    #[arg(long)]
    max_malformed_fraction: Option<f64>,
    /// CSV mapping arxiv_id to category.
    #[arg(long)]
    arxiv_categories: Option<PathBuf>,
    /// Compare drift figures with the published full-registry values.
    #[arg(long)]
    reference: bool,
}

impl RunArgs {
    fn into_config(self) -> RunConfig {
        let mut c = RunConfig::new(self.snapshot, self.output_dir);
        c.cards = self.cards;
        c.cache_dir = self.cache_dir;
        c.seed = self.seed;
        c.vocabulary_cap = self.vocabulary_cap.unwrap_or(c.vocabulary_cap);
        c.sample_size = self.sample_size.unwrap_or(c.sample_size);
        c.top_k = self.top_k.unwrap_or(c.top_k);
        c.top_n = self.top_n.unwrap_or(c.top_n);
        c.exact_cap = self.exact_cap.unwrap_or(c.exact_cap);
        if !self.metrics.is_empty() {
            c.metrics = self.metrics;
        }
        c.objective = self.objective.unwrap_or(c.objective);
        c.tie_rule = self.tie_rule.unwrap_or(c.tie_rule);
        c.pair_universe = self.pair_universe.unwrap_or(c.pair_universe);
        c.idf = self.idf.unwrap_or(c.idf);
        c.ngrams = self.ngrams.unwrap_or(c.ngrams);
        c.node_selection = self.node_selection.unwrap_or(c.node_selection);
        c.max_chars = self.max_chars.unwrap_or(c.max_chars);
        c.max_malformed_fraction = self.max_malformed_fraction.unwrap_or(c.max_malformed_fraction);
        c.arxiv_categories = self.arxiv_categories;
        c.reference = self.reference;
        c
    }
}

#[derive(Args)]
struct FetchArgs {
    /// Registry root, e.g. https://huggingface.co
    #[arg(long)]
    base_url: String,
    /// Snapshot file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also download cards into this store.
    #[arg(long)]
    cards: Option<PathBuf>,
    /// Continue an interrupted download.
    #[arg(long)]
    resume: bool,
    /// Environment variable holding the API token.
    #[arg(long, default_value = DEFAULT_TOKEN_ENV)]
    token_env: String,
    #[arg(long, default_value_t = 5.0)]
    rate: f64,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value_t = DEFAULT_PAGE_SIZE)]
    page_size: usize,
    #[arg(long, default_value_t = 5)]
    max_retries: u32,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
}

fn report_run(outcome: RunOutcome) {
    println!("{}", outcome.manifest.display());
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> lineage::Result<()> {
    match cli.command {
        Command::Summary(a) => report_run(report::cmd_summary(&a.into_config())?),
        Command::Similarity(a) => report_run(report::cmd_similarity(&a.into_config())?),
        Command::Drift { trait_kind, run } => report_run(report::cmd_drift(&run.into_config(), &trait_kind)?),
        Command::Graphstats(a) => report_run(report::cmd_graphstats(&a.into_config())?),
        Command::Cards(a) => report_run(report::cmd_cards(&a.into_config())?),
        Command::Fetch(a) => {
            let mut config = FetchConfig::new(a.base_url).with_token_from_env(&a.token_env);
            config.requests_per_second = a.rate;
            config.workers = a.workers;
            config.page_size = a.page_size;
            config.max_retries = a.max_retries;
            config.timeout = Duration::from_secs(a.timeout);
            let req = FetchRequest { config, out: a.out, cards: a.cards, resume: a.resume };
            match report::cmd_fetch(&req) {
                Ok(o) => {
                    println!("{}", req.out.display());
                    eprintln!(
                        "{} records in {} pages; {} cards, {} models without a card",
                        o.records, o.pages, o.cards_present, o.cards_absent
                    );
                }
                Err(e @ Error::FetchAborted { .. }) => {
                    eprintln!("checkpoint kept at {}; rerun with --resume", checkpoint_path(&req.out).display());
                    return Err(e);
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
