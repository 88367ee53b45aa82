//! `xsl`: build cross-modal graphs from episode streams, train aligned
//! representations and evaluate word-object mappings.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::SimPairs;
use config::{parse_assignment, resolve, RunConfig, Sources, SEED_ENV};
use error::CliError;

#[derive(Parser)]
#[command(name = "xsl", version, about = "Streaming cross-situational word learning")]
struct Cli {
    /// JSON configuration file with dotted keys
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set train.delta=0.1`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Seed for every stochastic stage
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph snapshot written by `build-graph`
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic episode corpus and its gold lexicon
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        /// Gold lexicon JSON mapping object symbols to alias lists
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Stream episodes into a graph snapshot
    BuildGraph {
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Continue from an existing snapshot
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        min_count: Option<u64>,
    },
    /// Train aligned embeddings on a graph
    Train {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: PathBuf,
        /// Per-step loss CSV
        #[arg(long)]
        trace: Option<PathBuf>,
        /// JSON list of [object, word] pairs to remove before training
        #[arg(long)]
        holdout: Option<PathBuf>,
        /// pair-only or row-and-column
        #[arg(long)]
        scope: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Top-K mapping accuracy of every cross-weight mode
    EvalMap {
        #[command(flatten)]
        graph: GraphArgs,
        /// Gold lexicon JSON mapping object symbols to alias lists
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Top-K accuracy while the graph grows
    LearningCurve {
        #[arg(long)]
        episodes: PathBuf,
        /// Gold lexicon JSON mapping object symbols to alias lists
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        eval_every: Option<usize>,
    },
    /// Zero-shot mapping of held-out pairs
    EvalZeroshot {
        #[command(flatten)]
        graph: GraphArgs,
        /// Gold lexicon JSON mapping object symbols to alias lists
        #[arg(long)]
        gold: PathBuf,
        /// Comma-separated: ours, no_align, spearman, random
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Pairs held out per trial
        #[arg(long)]
        z: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// pair-only or row-and-column
        #[arg(long)]
        scope: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-shot accuracy over a grid of delta, layers and lambda
    Sweep {
        #[command(flatten)]
        graph: GraphArgs,
        /// Gold lexicon JSON mapping object symbols to alias lists
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge list CSV
    ExportGraph {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// product, word-side, object-side or prior
        #[arg(long)]
        mode: Option<String>,
    },
    /// Embedding TSV
    ExportEmbeddings {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write aggregated rather than base vectors
        #[arg(long)]
        aggregated: bool,
    },
    /// Object-word cosine similarity matrix CSV
    ExportSim {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        model: PathBuf,
        /// JSON list of [object, word] pairs
        #[arg(long, conflicts_with = "gold", required_unless_present = "gold")]
        pairs: Option<PathBuf>,
        /// Use the gold lexicon's unambiguous pairs instead
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Keep only the first N gold pairs
        #[arg(long, requires = "gold")]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn flag<T: Into<Value>>(flags: &mut Vec<(String, Value)>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        flags.push((key.to_owned(), v.into()));
    }
}

impl Command {
    /// Command-line flags that override configuration keys.
    fn config_flags(&self) -> Vec<(String, Value)> {
        let mut f = Vec::new();
        match self {
            Command::GenCorpus { episodes, .. } => flag(&mut f, "synthetic.n_episodes", *episodes),
            Command::BuildGraph {
                window, min_count, ..
            } => {
                flag(&mut f, "window", *window);
                flag(&mut f, "min_count", *min_count);
            }
            Command::Train { scope, steps, .. } => {
                flag(&mut f, "zero_shot.scope", scope.clone());
                flag(&mut f, "train.steps", *steps);
            }
            Command::LearningCurve { eval_every, .. } => flag(&mut f, "eval_every", *eval_every),
            Command::EvalZeroshot {
                methods,
                z,
                trials,
                scope,
                ..
            } => {
                flag(&mut f, "zero_shot.methods", methods.clone());
                flag(&mut f, "zero_shot.z", *z);
                flag(&mut f, "zero_shot.trials", *trials);
                flag(&mut f, "zero_shot.scope", scope.clone());
            }
            Command::ExportGraph { mode, .. } => flag(&mut f, "mode", mode.clone()),
            _ => {}
        }
        f
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut flags = cli.command.config_flags();
    flag(&mut flags, "seed", cli.seed);
    let sets = cli
        .set
        .iter()
        .map(|s| parse_assignment(s))
        .collect::<Result<_, _>>()?;
    let config: RunConfig = resolve(Sources {
        file: cli.config.as_deref(),
        env_seed: std::env::var(SEED_ENV).ok(),
        sets,
        flags,
    })?;
    eprintln!("config {}", config.to_flat_json());

    let c = &config;
    match &cli.command {
        Command::GenCorpus { out, gold, .. } => commands::gen_corpus(c, out, gold),
        Command::BuildGraph {
            episodes,
            out,
            resume,
            ..
        } => commands::build_graph(c, episodes, out, resume.as_deref()),
        Command::Train {
            graph,
            out,
            trace,
            holdout,
            ..
        } => commands::train_model(c, &graph.graph, out, trace.as_deref(), holdout.as_deref()),
        Command::EvalMap {
            graph,
            gold,
            out,
            report,
        } => commands::eval_map(c, &graph.graph, gold, out.as_deref(), report.as_deref()),
        Command::LearningCurve {
            episodes,
            gold,
            out,
            ..
        } => commands::learning_curve_cmd(c, episodes, gold, out.as_deref()),
        Command::EvalZeroshot {
            graph,
            gold,
            report,
            out,
            ..
        } => commands::eval_zeroshot(c, &graph.graph, gold, out.as_deref(), report.as_deref()),
        Command::Sweep { graph, gold, out } => commands::sweep(c, &graph.graph, gold, out.as_deref()),
        Command::ExportGraph { graph, out, .. } => commands::export_graph(c, &graph.graph, out.as_deref()),
        Command::ExportEmbeddings {
            graph,
            model,
            out,
            aggregated,
        } => commands::export_embeddings(&graph.graph, model, out.as_deref(), *aggregated),
        Command::ExportSim {
            graph,
            model,
            pairs,
            gold,
            limit,
            out,
        } => {
            let pairs = match (pairs, gold) {
                (Some(p), _) => SimPairs::File(p),
                (None, Some(g)) => SimPairs::Gold {
                    path: g,
                    limit: *limit,
                },
                (None, None) => unreachable!("clap requires --pairs or --gold"),
            };
            commands::export_sim(&graph.graph, model, pairs, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
