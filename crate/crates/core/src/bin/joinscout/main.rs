//! `joinscout` command-line tool.
//!
//! JSON goes to stdout, diagnostics to stderr (`RUST_LOG` controls the level).
//! Exit status is 0 on success, 1 on I/O or data failures, 2 on bad arguments
//! or unknown attributes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;

use joinscout::discovery::{
    discover_by_attribute, evaluate_threshold_classifier, generate_ground_truth, index_repository,
    profile_dataset, ranking_metrics, read_ground_truth, relevant_candidates, subsample_zero_overlap,
    training_examples, write_ground_truth, ClassifierReport, GroundTruthOptions, IndexOptions,
    RankingMetrics, ScoreColumn,
};
use joinscout::metrics::{fit_distribution, FitGrid};
use joinscout::predictor::{read_corpus, train, write_corpus, TrainConfig};
use joinscout::profiler::ProfileDocument;
use joinscout::tabular::load_dataset;
use joinscout::{AttributeProfile, Error, FittedParams, ProfileStore, RegressionModel, Result, Strictness};

const PARAMS_ENV: &str = "JOINSCOUT_PARAMS";

#[derive(Parser, Debug)]
#[command(name = "joinscout", version, about = "Join discovery over repositories of CSV files")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Field delimiter of input files.
    #[arg(long, global = true, default_value_t = ',')]
    delimiter: char,
    /// Input files have no header row; columns are named col_0, col_1, ...
    #[arg(long, global = true)]
    no_header: bool,
    /// Worker threads. Defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Columns with at least this fraction of numeric cells are skipped.
    #[arg(long, global = true, default_value_t = joinscout::tabular::DEFAULT_NUMERIC_EXCLUSION)]
    numeric_threshold: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one profile document per input file.
    Profile {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Profile input files into a single store.
    Index {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Add to this store instead of starting from scratch.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Rank attributes of other datasets by predicted join quality.
    Discover {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Query attribute as dataset.attribute.
        #[arg(short, long)]
        query: String,
        #[arg(short, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Exact metrics for every cross-dataset attribute pair.
    GroundTruth {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Fitted parameters JSON; falls back to $JOINSCOUT_PARAMS, then the defaults.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Fit the containment and cardinality distributions of a ground truth.
    FitDist {
        ground_truth: PathBuf,
        /// Also write the parameters here.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Smallest level a pair needs to enter the fit.
        #[arg(long, default_value_t = 1)]
        min_level: u32,
    },
    /// Train the quality predictor.
    Train {
        /// Ground truth CSV. Not needed with --corpus.
        ground_truth: Option<PathBuf>,
        /// Directory of profile documents, or a store file.
        profiles: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Train on a previously written corpus instead.
        #[arg(long, conflicts_with_all = ["ground_truth", "profiles"])]
        corpus: Option<PathBuf>,
        /// Write the training corpus here.
        #[arg(long)]
        corpus_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StrictnessArg::Balanced)]
        strictness: StrictnessArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        /// Zero-overlap pairs kept per overlapping pair.
        #[arg(long, default_value_t = 1.0)]
        zero_ratio: f64,
    },
    /// Threshold classifier or top-k ranking evaluation against a ground truth.
    Evaluate {
        ground_truth: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Q)]
        metric: MetricArg,
        /// Classifier threshold. Without it every threshold 0.00..=1.00 is swept.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value_t = StrictnessArg::Balanced)]
        strictness: StrictnessArg,
        /// Evaluate top-k rankings instead; needs --model.
        #[arg(long, requires = "model")]
        store: Option<PathBuf>,
        #[arg(long, requires = "store")]
        model: Option<PathBuf>,
        #[arg(short, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrictnessArg {
    Relaxed,
    Balanced,
    Strict,
}

impl From<StrictnessArg> for Strictness {
    fn from(s: StrictnessArg) -> Self {
        match s {
            StrictnessArg::Relaxed => Strictness::Relaxed,
            StrictnessArg::Balanced => Strictness::Balanced,
            StrictnessArg::Strict => Strictness::Strict,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MetricArg {
    #[value(name = "C")]
    C,
    #[value(name = "J")]
    J,
    #[value(name = "K")]
    K,
    #[value(name = "Q")]
    Q,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::UnknownAttribute(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    if !g.delimiter.is_ascii() {
        return Err(Error::InvalidArgument("delimiter must be a single ASCII character".into()));
    }
    let index = IndexOptions {
        delimiter: g.delimiter as u8,
        has_header: !g.no_header,
        numeric_threshold: g.numeric_threshold,
    };
    match cli.command {
        Command::Profile { inputs, out } => cmd_profile(&inputs, &out, &index),
        Command::Index { inputs, out, base } => cmd_index(&inputs, &out, base.as_deref(), &index),
        Command::Discover { store, model, query, k } => {
            let store = ProfileStore::load(store)?;
            let model = RegressionModel::load(model)?;
            let query = store.resolve(&query)?;
            let ranking = discover_by_attribute(&store, &model, &query, k as usize)?;
            println!("{}", ranking.to_json()?);
            Ok(())
        }
        Command::GroundTruth { inputs, out, params } => {
            let params = load_params(params.as_deref())?;
            let datasets = inputs
                .iter()
                .map(|p| load_dataset(p, index.delimiter, index.has_header))
                .collect::<Result<Vec<_>>>()?;
            let opts = GroundTruthOptions { numeric_threshold: index.numeric_threshold, params };
            let entries = generate_ground_truth(&datasets, &opts)?;
            write_ground_truth(&out, &entries)?;
            let semantic = entries.iter().filter(|e| e.is_semantic()).count();
            print_json(&serde_json::json!({ "pairs": entries.len(), "semantic": semantic, "out": out }))
        }
        Command::FitDist { ground_truth, out, min_level } => {
            let entries = read_ground_truth(&ground_truth)?;
            let used: Vec<_> = entries.iter().filter(|e| e.level >= min_level).collect();
            let c: Vec<f64> = used.iter().map(|e| e.containment).collect();
            let k: Vec<f64> = used.iter().map(|e| e.k).collect();
            let fit = fit_distribution(&c, &k, &FitGrid::default())?;
            for (name, axis) in [("containment", &fit.containment), ("cardinality", &fit.cardinality)] {
                if axis.degenerate {
                    warn!("{name} fit sits on the smallest grid deviation; samples are nearly constant");
                }
            }
            if let Some(out) = out {
                fit.params.save(out)?;
            }
            print_json(&serde_json::json!({ "samples": used.len(), "fit": fit }))
        }
        Command::Train { ground_truth, profiles, out, corpus, corpus_out, strictness, seed, epochs, zero_ratio } => {
            let examples = match (corpus, ground_truth, profiles) {
                (Some(corpus), _, _) => read_corpus(corpus)?,
                (None, Some(gt), Some(profiles)) => {
                    let store = load_profiles(&profiles)?;
                    let entries = subsample_zero_overlap(&read_ground_truth(gt)?, zero_ratio, seed);
                    training_examples(&entries, &store, strictness.into())?
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "train needs a ground truth and profiles, or --corpus".into(),
                    ))
                }
            };
            if let Some(path) = corpus_out {
                write_corpus(path, &examples)?;
            }
            let config = TrainConfig { seed, epochs, ..TrainConfig::default() };
            let model = train(&examples, &config)?;
            model.save(&out)?;
            print_json(&serde_json::json!({
                "examples": examples.len(),
                "final_train_mse": model.training.final_train_mse,
                "out": out,
            }))
        }
        Command::Evaluate { ground_truth, metric, threshold, strictness, store, model, k } => {
            let entries = read_ground_truth(&ground_truth)?;
            match (store, model) {
                (Some(store), Some(model)) => {
                    let store = ProfileStore::load(store)?;
                    let model = RegressionModel::load(model)?;
                    print_json(&evaluate_rankings(&entries, &store, &model, k as usize)?)
                }
                _ => {
                    let column = match metric {
                        MetricArg::C => ScoreColumn::Containment,
                        MetricArg::J => ScoreColumn::Jaccard,
                        MetricArg::K => ScoreColumn::Cardinality,
                        MetricArg::Q => ScoreColumn::Quality(strictness.into()),
                    };
                    print_json(&evaluate_thresholds(&entries, column, threshold)?)
                }
            }
        }
    }
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load_params(path: Option<&Path>) -> Result<FittedParams> {
    match path.map(PathBuf::from).or_else(|| std::env::var_os(PARAMS_ENV).map(PathBuf::from)) {
        Some(p) => FittedParams::load(p),
        None => Ok(FittedParams::default()),
    }
}

fn cmd_profile(inputs: &[PathBuf], out: &Path, opts: &IndexOptions) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.to_path_buf(), source: e })?;
    let mut written = Vec::new();
    for path in inputs {
        let result = load_dataset(path, opts.delimiter, opts.has_header).and_then(|d| {
            let profiles = profile_dataset(&d, opts.numeric_threshold)?;
            let target = out.join(format!("{}.json", d.name));
            ProfileDocument::new(&d.name, &profiles).save(&target)?;
            Ok(target)
        });
        match result {
            Ok(target) => {
                info!("{} -> {}", path.display(), target.display());
                written.push(target);
            }
            Err(e) => warn!("{}: {e}", path.display()),
        }
    }
    if written.is_empty() {
        return Err(Error::Empty("every input file failed to profile"));
    }
    print_json(&serde_json::json!({ "written": written, "failed": inputs.len() - written.len() }))
}

fn cmd_index(inputs: &[PathBuf], out: &Path, base: Option<&Path>, opts: &IndexOptions) -> Result<()> {
    let outcome = index_repository(inputs, opts)?;
    let store = match base {
        Some(base) => ProfileStore::load(base)?.with_added(outcome.store.profiles().to_vec())?,
        None => outcome.store,
    };
    store.save(out)?;
    print_json(&serde_json::json!({
        "version": store.version,
        "attributes": store.len(),
        "datasets": store.datasets().len(),
        "failed": outcome.failures.len(),
    }))
}

/// A store file, or a directory of profile documents.
fn load_profiles(path: &Path) -> Result<ProfileStore> {
    if path.is_file() {
        return ProfileStore::load(path);
    }
    let entries = std::fs::read_dir(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut profiles: Vec<AttributeProfile> = Vec::new();
    for f in &files {
        profiles.extend(ProfileDocument::load(f)?.attributes);
    }
    ProfileStore::from_profiles(profiles, 1)
}

#[derive(Serialize)]
struct ThresholdRow {
    threshold: f64,
    #[serde(flatten)]
    report: ClassifierReport,
}

fn evaluate_thresholds(
    entries: &[joinscout::GroundTruthEntry],
    column: ScoreColumn,
    threshold: Option<f64>,
) -> Result<ThresholdRow> {
    if let Some(t) = threshold {
        return Ok(ThresholdRow { threshold: t, report: evaluate_threshold_classifier(entries, column, t)? });
    }
    let mut best: Option<ThresholdRow> = None;
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        let report = evaluate_threshold_classifier(entries, column, t)?;
        if best.as_ref().map_or(true, |b| report.f_score > b.report.f_score) {
            best = Some(ThresholdRow { threshold: t, report });
        }
    }
    Ok(best.expect("sweep is non-empty"))
}

#[derive(Serialize)]
struct RankingSummary {
    queries: usize,
    mean_precision_at_k: f64,
    mean_recall_at_ground_truth: f64,
    per_query: BTreeMap<String, RankingMetrics>,
}

fn evaluate_rankings(
    entries: &[joinscout::GroundTruthEntry],
    store: &ProfileStore,
    model: &RegressionModel,
    k: usize,
) -> Result<RankingSummary> {
    let mut per_query = BTreeMap::new();
    for p in store.profiles() {
        let query = joinscout::AttributeId::of(p);
        let relevant = relevant_candidates(entries, &query);
        if relevant.is_empty() {
            continue;
        }
        let ranking = discover_by_attribute(store, model, &query, k)?;
        per_query.insert(query.to_string(), ranking_metrics(&ranking, &relevant, k)?);
    }
    if per_query.is_empty() {
        return Err(Error::Empty("no query attribute has a semantic join in the ground truth"));
    }
    let n = per_query.len() as f64;
    Ok(RankingSummary {
        queries: per_query.len(),
        mean_precision_at_k: per_query.values().map(|m| m.precision_at_k).sum::<f64>() / n,
        mean_recall_at_ground_truth: per_query.values().map(|m| m.recall_at_ground_truth).sum::<f64>() / n,
        per_query,
    })
}
