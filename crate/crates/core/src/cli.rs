//! Command-line surface. Every subcommand reads its settings from flags,
//! falling back to the matching table of an optional TOML config file
//! (`--config`), then to built-in defaults.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::chemtime::{EmbeddingTable, HyperParams, LossKind};
use crate::data::Dataset;
use crate::error::Error;
use crate::eval::{
    average_ranks, frontier_from_records, make_splits, read_records, run_benchmark, survival, write_records,
    BenchmarkData, SurvivalConfig, SurvivalMode, DEFAULT_SPLITS,
};
use crate::model::{FittedModel, Learner, ModelFile, ModelSpec};
use crate::simgen::{generate_dataset, SimConfig, N_PRESETS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chemtime", version, about = "Early classification of sensor-array exposures")]
pub struct Cli {
    /// TOML file with one table per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write simulated train/test dataset files.
    Simgen(SimgenArgs),
    /// Fit one model and write a model file.
    Train(TrainArgs),
    /// Fit every model on every dataset split and write a results table.
    Benchmark(BenchmarkArgs),
    /// Shrinking-window elimination contest.
    Survival(SurvivalArgs),
    /// Inference-time vs F1 frontier from a results table.
    Frontier(FrontierArgs),
    /// Per-step embeddings and decision distances of one sample.
    Trajectory(TrajectoryArgs),
    /// Average rank of every model from a results table.
    Ranks(RanksArgs),
}

/// Fills every unset field of `self` from `other`.
trait Merge {
    fn merge(self, other: Self) -> Self;
}

macro_rules! mergeable {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            fn merge(self, other: Self) -> Self {
                $ty { $($field: self.$field.or(other.$field)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimgenArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sensor-array preset, 0..11.
    #[arg(long)]
    pub preset: Option<u64>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
mergeable!(SimgenArgs { seed, preset, n_train, n_test, out_dir });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding table file (recurrent embedder only).
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    /// squared | cosine | hinge_rank
    #[arg(long)]
    pub loss: Option<String>,
}
mergeable!(TrainArgs { model, train, out, seed, table, hidden, epochs, lr, batch, loss });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated model names.
    #[arg(long)]
    pub models: Option<String>,
    /// Number of simulated presets to benchmark on when no files are given.
    #[arg(long)]
    pub presets: Option<usize>,
    /// Training dataset files; paired in order with --test.
    #[arg(long, num_args = 1..)]
    pub train: Option<Vec<PathBuf>>,
    #[arg(long, num_args = 1..)]
    pub test: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Recurrent embedder epochs (overrides the default of 50).
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(BenchmarkArgs { seed, models, presets, train, test, jobs, epochs, out });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurvivalArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub models: Option<String>,
    #[arg(long)]
    pub preset: Option<u64>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub floor: Option<f64>,
    /// Charge each model's decision latency against the window.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub biased: Option<bool>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(SurvivalArgs { seed, models, preset, train, test, start, step, floor, biased, epochs, out });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontierArgs {
    #[arg(long)]
    pub results: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(FrontierArgs { results, out });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Sample id; the first sample when absent.
    #[arg(long)]
    pub sample: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(TrajectoryArgs { model, data, sample, out });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RanksArgs {
    #[arg(long)]
    pub results: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(RanksArgs { results, out });

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    simgen: Option<SimgenArgs>,
    train: Option<TrainArgs>,
    benchmark: Option<BenchmarkArgs>,
    survival: Option<SurvivalArgs>,
    frontier: Option<FrontierArgs>,
    trajectory: Option<TrajectoryArgs>,
    ranks: Option<RanksArgs>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<T>(v: Option<T>, field: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("missing required setting `{field}`")))
}

fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("malformed config {}: {e}", path.display())))
}

fn log_resolved<T: Serialize>(command: &str, args: &T) {
    let json = serde_json::to_string(args).unwrap_or_default();
    eprintln!("chemtime {command}: resolved config {json}");
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_models(list: Option<&str>, seed: u64, epochs: Option<usize>) -> CliResult<Vec<ModelSpec>> {
    let specs = match list {
        None => ModelSpec::default_roster(seed),
        Some(s) => s
            .split(',')
            .map(|name| name.trim().parse::<ModelSpec>().map(|m| m.with_seed(seed)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage(format!("models: {e}")))?,
    };
    Ok(specs
        .into_iter()
        .map(|m| match (m, epochs) {
            (ModelSpec::Chemtime { hp, boost, table }, Some(epochs)) => ModelSpec::Chemtime {
                hp: HyperParams { epochs, ..hp },
                boost,
                table,
            },
            (m, _) => m,
        })
        .collect())
}

fn cmd_simgen(args: SimgenArgs) -> CliResult<()> {
    let seed = args.seed.unwrap_or(0);
    let preset = args.preset.unwrap_or(0);
    if preset as usize >= N_PRESETS {
        return Err(usage(format!("preset must be below {N_PRESETS}")));
    }
    let base = SimConfig::preset(preset, seed);
    let cfg = SimConfig {
        n_train: args.n_train.unwrap_or(base.n_train),
        n_test: args.n_test.unwrap_or(base.n_test),
        ..base
    };
    let dir = args.out_dir.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let (train, test) = generate_dataset(&cfg)?;
    train.save(dir.join(format!("{}-train.json", cfg.name)))?;
    test.save(dir.join(format!("{}-test.json", cfg.name)))?;
    Ok(())
}

fn cmd_train(args: TrainArgs) -> CliResult<()> {
    let name = required(args.model, "model")?;
    let train_path = required(args.train, "train")?;
    let out = required(args.out, "out")?;
    let seed = args.seed.unwrap_or(0);
    let mut spec: ModelSpec = name.parse().map_err(|e: Error| usage(format!("model: {e}")))?;
    spec = spec.with_seed(seed);
    if let ModelSpec::Chemtime { hp, boost, .. } = spec {
        let mut hp = hp;
        if let Some(v) = args.hidden {
            hp.hidden = v;
        }
        if let Some(v) = args.epochs {
            hp.epochs = v;
        }
        if let Some(v) = args.lr {
            hp.lr = v;
        }
        if let Some(v) = args.batch {
            hp.batch = v;
        }
        if let Some(v) = &args.loss {
            hp.loss_kind = v.parse::<LossKind>().map_err(|e| usage(format!("loss: {e}")))?;
        }
        let table = args.table.as_deref().map(EmbeddingTable::load).transpose()?;
        spec = ModelSpec::Chemtime { hp, boost, table };
    }
    let train = Dataset::load(&train_path)?;
    let model = spec.fit_model(&train)?;
    ModelFile {
        name: spec.name(),
        model,
    }
    .save(&out)?;
    Ok(())
}

fn benchmark_data(train: Dataset, test: Dataset, seed: u64) -> CliResult<BenchmarkData> {
    let name = train.name.trim_end_matches("-train").to_string();
    let splits = make_splits(&train, DEFAULT_SPLITS, seed)?;
    Ok(BenchmarkData {
        name,
        train,
        test,
        splits,
    })
}

fn cmd_benchmark(args: BenchmarkArgs) -> CliResult<()> {
    let seed = args.seed.unwrap_or(0);
    let specs = parse_models(args.models.as_deref(), seed, args.epochs)?;
    let data = match (args.train, args.test) {
        (Some(tr), Some(te)) => {
            if tr.len() != te.len() {
                return Err(usage("train and test file lists differ in length"));
            }
            tr.iter()
                .zip(&te)
                .map(|(a, b)| benchmark_data(Dataset::load(a)?, Dataset::load(b)?, seed))
                .collect::<CliResult<Vec<_>>>()?
        }
        (None, None) => {
            let n = args.presets.unwrap_or(N_PRESETS).min(N_PRESETS);
            (0..n as u64)
                .map(|p| {
                    let (tr, te) = generate_dataset(&SimConfig::preset(p, seed))?;
                    benchmark_data(tr, te, seed)
                })
                .collect::<CliResult<Vec<_>>>()?
        }
        _ => return Err(usage("train and test must be given together")),
    };
    let learners: Vec<&dyn Learner> = specs.iter().map(|s| s as &dyn Learner).collect();
    let records = run_benchmark(&learners, &data, args.jobs.unwrap_or(1))?;
    write_records(&records, output(args.out.as_deref())?)?;
    Ok(())
}

fn cmd_survival(args: SurvivalArgs) -> CliResult<()> {
    let seed = args.seed.unwrap_or(0);
    let specs = parse_models(args.models.as_deref(), seed, args.epochs)?;
    let (train, test) = match (args.train, args.test) {
        (Some(a), Some(b)) => (Dataset::load(a)?, Dataset::load(b)?),
        (None, None) => generate_dataset(&SimConfig::preset(args.preset.unwrap_or(0), seed))?,
        _ => return Err(usage("train and test must be given together")),
    };
    let data = benchmark_data(train, test, seed)?;
    let cfg = SurvivalConfig {
        start_s: args.start.unwrap_or(5.0),
        step_s: args.step.unwrap_or(0.25),
        floor: args.floor.unwrap_or(0.8),
        mode: if args.biased.unwrap_or(false) {
            SurvivalMode::InferenceBiased
        } else {
            SurvivalMode::Plain
        },
    };
    let learners: Vec<&dyn Learner> = specs.iter().map(|s| s as &dyn Learner).collect();
    let table = survival(&learners, &data, &cfg)?;
    table.write_csv(output(args.out.as_deref())?)?;
    Ok(())
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))
}

fn cmd_frontier(args: FrontierArgs) -> CliResult<()> {
    let records = read_records(open(&required(args.results, "results")?)?)?;
    let points = frontier_from_records(&records);
    crate::eval::frontier::write_frontier(&points, output(args.out.as_deref())?)?;
    Ok(())
}

fn cmd_ranks(args: RanksArgs) -> CliResult<()> {
    let records = read_records(open(&required(args.results, "results")?)?)?;
    let ranks = average_ranks(&records)?;
    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    let io = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(["model", "avg_rank"]).map_err(io)?;
    for (m, r) in ranks {
        w.write_record([m, r.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))
}

fn cmd_trajectory(args: TrajectoryArgs) -> CliResult<()> {
    let file = ModelFile::load(required(args.model, "model")?)?;
    let FittedModel::Chemtime(model) = file.model else {
        return Err(CliError::Data(format!("model `{}` has no embedding trajectory", file.name)));
    };
    let data = Dataset::load(required(args.data, "data")?)?;
    let sample = match &args.sample {
        Some(id) => data.samples.iter().find(|s| &s.id == id),
        None => data.samples.first(),
    }
    .ok_or_else(|| CliError::Data("sample not found".into()))?;
    let traj = model.forward(sample)?;
    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    let io = |e: csv::Error| CliError::Data(e.to_string());
    let mut header = vec!["step".to_string(), "time_s".to_string()];
    header.extend((0..model.table.dim).map(|i| format!("e{i}")));
    header.push("distance".into());
    w.write_record(&header).map_err(io)?;
    for (t, e) in traj.points.iter().enumerate() {
        let mut row = vec![t.to_string(), ((t + 1) as f64 / sample.sample_rate).to_string()];
        row.extend(e.iter().map(|v| v.to_string()));
        row.push(traj.distances.as_ref().map_or(String::new(), |d| d[t].to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Simgen(a) => {
            let a = a.merge(cfg.simgen.unwrap_or_default());
            log_resolved("simgen", &a);
            cmd_simgen(a)
        }
        Command::Train(a) => {
            let a = a.merge(cfg.train.unwrap_or_default());
            log_resolved("train", &a);
            cmd_train(a)
        }
        Command::Benchmark(a) => {
            let a = a.merge(cfg.benchmark.unwrap_or_default());
            log_resolved("benchmark", &a);
            cmd_benchmark(a)
        }
        Command::Survival(a) => {
            let a = a.merge(cfg.survival.unwrap_or_default());
            log_resolved("survival", &a);
            cmd_survival(a)
        }
        Command::Frontier(a) => {
            let a = a.merge(cfg.frontier.unwrap_or_default());
            log_resolved("frontier", &a);
            cmd_frontier(a)
        }
        Command::Trajectory(a) => {
            let a = a.merge(cfg.trajectory.unwrap_or_default());
            log_resolved("trajectory", &a);
            cmd_trajectory(a)
        }
        Command::Ranks(a) => {
            let a = a.merge(cfg.ranks.unwrap_or_default());
            log_resolved("ranks", &a);
            cmd_ranks(a)
        }
    }
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the
/// process exit code: 0 success, 1 usage error, 2 data or model error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            EXIT_DATA
        }
    }
}
