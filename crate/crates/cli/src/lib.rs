//! The `fairrank` command line: argument definitions and command
//! implementations. `main` only parses and maps errors to exit codes.

mod input;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fairrank::metrics::{infeasible_index, kendall_tau, kendall_tau_coefficient, ndcg, spearman_distance};
use fairrank::rankers::CenterSource;
use fairrank::{
    ranking_from_scores, CandidateSet, FairnessSpec, GroupAssignment, RankerConfig, RankerRegistry, Ranking,
    RankingTask, SelectionCriterion,
};
use fairrank_experiments::german::GermanFormat;
use fairrank_experiments::{ingest_german_credit, run_manifest, write_outputs, ExperimentError, Manifest};

pub use input::{read_candidates, read_ranking};
pub use report::Format;

pub const SEED_ENV: &str = "FAIRRANK_SEED";

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

impl From<fairrank::Error> for CliError {
    fn from(e: fairrank::Error) -> Self {
        use fairrank::Error as E;
        match e {
            e if e.is_infeasibility() => CliError::Infeasible(e.to_string()),
            E::InvalidParameter(_) | E::InvalidSpec(_) | E::UnknownAlgorithm(_) => CliError::Usage(e.to_string()),
            e => CliError::Data(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Ranking(e) => e.into(),
            e => CliError::Data(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "fairrank", version, about = "Fair re-ranking under proportional prefix constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Re-rank a candidate file with one of the registered algorithms.
    Rank(RankArgs),
    /// Compute distance, quality and fairness metrics of a ranking.
    Measure(MeasureArgs),
    /// Run an experiment manifest and write its result files.
    Experiment(ExperimentArgs),
    /// Dataset utilities.
    #[command(subcommand)]
    Dataset(DatasetCommand),
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Parse the German Credit file and print its group distribution.
    Check(DatasetCheckArgs),
}

/// Group and fairness-target options shared by `rank` and `measure`.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Protected attribute (an `attr:<name>` column). Defaults to the only
    /// attribute column when there is exactly one.
    #[arg(long)]
    pub attribute: Option<String>,
    /// Upper proportions, comma separated, in sorted group-label order.
    /// Defaults to the group proportions.
    #[arg(long, value_delimiter = ',', requires = "beta")]
    pub alpha: Option<Vec<f64>>,
    /// Lower proportions, comma separated, in sorted group-label order.
    #[arg(long, value_delimiter = ',', requires = "alpha")]
    pub beta: Option<Vec<f64>>,
    /// Shortest prefix the bounds apply to.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Candidate CSV with columns `id`, `score` and `attr:<name>`.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Algorithm: approx-multi-valued-ipf, det-const-sort, exact-fair-dcg,
    /// mallows or weakly-fair-center.
    #[arg(long)]
    pub algo: String,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Reference input ranking (CSV with an `id` column); defaults to the
    /// score order.
    #[arg(long)]
    pub input_ranking: Option<PathBuf>,
    /// Mallows dispersion.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Mallows sample count.
    #[arg(long, short = 'm', default_value_t = 1)]
    pub m: usize,
    /// Mallows sample selection: max-ndcg, min-kt or min-infeasible-index.
    #[arg(long, default_value = "max-ndcg")]
    pub criterion: String,
    /// Mallows center: the weakly fair ranking or the input ranking.
    #[arg(long, value_enum, default_value_t = CenterArg::WeaklyFair)]
    pub center: CenterArg,
    /// Constraint-noise level for the baselines.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, env = SEED_ENV, default_value_t = fairrank_experiments::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenterArg {
    WeaklyFair,
    Input,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Metric {
    /// Kendall tau distance to the reference.
    Kt,
    /// Kendall tau correlation coefficient with the reference.
    TauCoeff,
    /// Spearman distance to the reference.
    Spearman,
    Ndcg,
    InfeasibleIndex,
    Ppfair,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Kt => "kt",
            Metric::TauCoeff => "tau-coeff",
            Metric::Spearman => "spearman",
            Metric::Ndcg => "ndcg",
            Metric::InfeasibleIndex => "infeasible-index",
            Metric::Ppfair => "ppfair",
        }
    }
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Ranking to measure (CSV with an `id` column, top first). Defaults to
    /// the score order of `--candidates`.
    #[arg(long)]
    pub ranking: Option<PathBuf>,
    /// Reference ranking for the distance metrics. Defaults to the score
    /// order of `--candidates`.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Candidate CSV; needed for ndcg and the fairness metrics.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Metrics to report, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "kt")]
    pub metrics: Vec<Metric>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment manifest (JSON).
    pub manifest: PathBuf,
    /// Overrides the manifest's output directory.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DatasetCheckArgs {
    /// German Credit CSV.
    #[arg(default_value = "data/german_credit.csv")]
    pub path: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Rank(a) => match &a.output {
            Some(path) => {
                let mut buf = Vec::new();
                cmd_rank(&a, &mut buf)?;
                std::fs::write(path, buf).map_err(io_err(path))
            }
            None => cmd_rank(&a, out),
        },
        Command::Measure(a) => cmd_measure(&a, out),
        Command::Experiment(a) => cmd_experiment(&a, out),
        Command::Dataset(DatasetCommand::Check(a)) => cmd_dataset_check(&a, out),
    }
}

fn delimiter(c: char) -> Result<u8> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| CliError::Usage(format!("delimiter must be a single ASCII character, got {c:?}")))
}

fn pick_attribute(set: &CandidateSet, requested: Option<&str>) -> Result<String> {
    if let Some(a) = requested {
        return Ok(a.to_string());
    }
    let names: Vec<&String> = set.candidates()[0].attributes.keys().collect();
    match names.as_slice() {
        [one] => Ok(one.to_string()),
        [] => Err(CliError::Data("candidate file has no attr:<name> column".into())),
        _ => Err(CliError::Usage(format!(
            "several attributes ({}); choose one with --attribute",
            names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn groups_and_spec(set: &CandidateSet, args: &SpecArgs) -> Result<(GroupAssignment, FairnessSpec)> {
    let attr = pick_attribute(set, args.attribute.as_deref())?;
    let groups = GroupAssignment::from_attribute(set, &attr)?;
    let spec = match (&args.alpha, &args.beta) {
        (Some(a), Some(b)) => {
            if a.len() != groups.num_groups() || b.len() != groups.num_groups() {
                return Err(CliError::Usage(format!(
                    "alpha/beta need {} entries, one per group ({})",
                    groups.num_groups(),
                    groups.labels().join(", ")
                )));
            }
            FairnessSpec::new(a.clone(), b.clone(), args.k)?
        }
        _ => FairnessSpec::proportional(&groups, args.k)?,
    };
    Ok((groups, spec))
}

/// Validates the flags before reading any data.
fn ranker_config(a: &RankArgs) -> Result<RankerConfig> {
    let registry = RankerRegistry::with_builtins();
    if !registry.contains(&a.algo) {
        return Err(CliError::Usage(format!(
            "unknown algorithm `{}`; choose one of: {}",
            a.algo,
            registry.names().collect::<Vec<_>>().join(", ")
        )));
    }
    let criterion: SelectionCriterion = a.criterion.parse()?;
    let config = RankerConfig {
        theta: a.theta,
        samples: a.m,
        criterion,
        center: match a.center {
            CenterArg::WeaklyFair => CenterSource::WeaklyFair,
            CenterArg::Input => CenterSource::Input,
        },
        sigma: a.sigma,
    };
    registry.build(&a.algo, &config)?;
    Ok(config)
}

pub fn cmd_rank(a: &RankArgs, out: &mut dyn Write) -> Result<()> {
    let config = ranker_config(a)?;
    let delim = delimiter(a.delimiter)?;
    let set = read_candidates(&a.input, delim)?;
    let (groups, spec) = groups_and_spec(&set, &a.spec)?;
    let mut task = RankingTask::new(&set, &groups, &spec)?.with_seed(a.seed);
    if let Some(path) = &a.input_ranking {
        task = task.with_input(read_ranking(path, delim, &id_index(&set))?)?;
    }
    let ranker = RankerRegistry::with_builtins().build(&a.algo, &config)?;
    let result = ranker.rank(&task)?;

    let rows: Vec<Vec<Value>> = result
        .ranking
        .iter()
        .enumerate()
        .map(|(pos, c)| {
            let cand = &set.candidates()[c];
            vec![
                json!(pos + 1),
                json!(cand.id),
                json!(cand.score),
                json!(groups.labels()[groups.group_of(c)]),
            ]
        })
        .collect();
    let header = ["position", "id", "score", "group"];
    let diagnostics: Map<String, Value> = result.diagnostics.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    match a.format {
        Format::Json => {
            let ranking: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            let doc = json!({
                "algorithm": a.algo,
                "seed": a.seed,
                "ranking": ranking,
                "diagnostics": diagnostics,
            });
            report::write_json(out, &doc)
        }
        Format::Csv => report::write_csv(out, &header, &rows),
        Format::Table => {
            report::write_table(out, &header, &rows)?;
            writeln!(out).map_err(report::stdout_err)?;
            let diag: Vec<Vec<Value>> = diagnostics.into_iter().map(|(k, v)| vec![json!(k), v]).collect();
            report::write_table(out, &["diagnostic", "value"], &diag)
        }
    }
}

fn id_index(set: &CandidateSet) -> Vec<String> {
    set.candidates().iter().map(|c| c.id.clone()).collect()
}

pub fn cmd_measure(a: &MeasureArgs, out: &mut dyn Write) -> Result<()> {
    let delim = delimiter(a.delimiter)?;
    let needs_set = a
        .metrics
        .iter()
        .any(|m| matches!(m, Metric::Ndcg | Metric::InfeasibleIndex | Metric::Ppfair));
    let needs_reference = a.metrics.iter().any(|m| matches!(m, Metric::Kt | Metric::TauCoeff | Metric::Spearman));
    if a.candidates.is_none() {
        if needs_set {
            return Err(CliError::Usage("ndcg and the fairness metrics need --candidates".into()));
        }
        if a.ranking.is_none() || (needs_reference && a.reference.is_none()) {
            return Err(CliError::Usage(
                "without --candidates, give both --ranking and --reference".into(),
            ));
        }
    }

    let set = a.candidates.as_deref().map(|p| read_candidates(p, delim)).transpose()?;
    let ids: Vec<String> = match (&set, &a.ranking) {
        (Some(s), _) => id_index(s),
        (None, Some(p)) => input::read_ids(p, delim)?,
        (None, None) => unreachable!("checked above"),
    };
    let load = |p: &Option<PathBuf>| -> Result<Ranking> {
        match (p, &set) {
            (Some(p), _) => read_ranking(p, delim, &ids),
            (None, Some(s)) => Ok(ranking_from_scores(s)),
            (None, None) => unreachable!("checked above"),
        }
    };
    let ranking = load(&a.ranking)?;
    let reference = if needs_reference { Some(load(&a.reference)?) } else { None };
    let fairness = match (&set, a.metrics.iter().any(|m| matches!(m, Metric::InfeasibleIndex | Metric::Ppfair))) {
        (Some(s), true) => {
            let (groups, spec) = groups_and_spec(s, &a.spec)?;
            Some(infeasible_index(&ranking, &groups, &spec)?)
        }
        _ => None,
    };

    let mut metrics = a.metrics.clone();
    metrics.sort();
    metrics.dedup();
    let mut values: Vec<(&str, Value)> = Vec::new();
    for m in metrics {
        let reference = || reference.as_ref().expect("reference loaded");
        let v = match m {
            Metric::Kt => json!(kendall_tau(&ranking, reference())?),
            Metric::TauCoeff => json!(kendall_tau_coefficient(&ranking, reference())?),
            Metric::Spearman => json!(spearman_distance(&ranking, reference())?),
            Metric::Ndcg => json!(ndcg(&ranking, set.as_ref().expect("candidates loaded"))?),
            Metric::InfeasibleIndex => json!(fairness.as_ref().expect("fairness computed").infeasible_index),
            Metric::Ppfair => json!(fairness.as_ref().expect("fairness computed").ppfair),
        };
        values.push((m.name(), v));
    }
    match a.format {
        Format::Json => {
            let doc: Map<String, Value> = values.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            report::write_json(out, &Value::Object(doc))
        }
        f => {
            let rows: Vec<Vec<Value>> = values.into_iter().map(|(k, v)| vec![json!(k), v]).collect();
            if f == Format::Csv {
                report::write_csv(out, &["metric", "value"], &rows)
            } else {
                report::write_table(out, &["metric", "value"], &rows)
            }
        }
    }
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn Write) -> Result<()> {
    let mut manifest = Manifest::load(&a.manifest).map_err(|e| match e {
        ExperimentError::Io { .. } => CliError::Data(e.to_string()),
        e => CliError::Usage(e.to_string()),
    })?;
    if let Some(dir) = &a.output_dir {
        let dir = if dir.is_absolute() {
            dir.clone()
        } else {
            std::env::current_dir().map_err(io_err(dir))?.join(dir)
        };
        manifest.output_dir = Some(dir);
    }
    let result = run_manifest(&manifest)?;
    let files = write_outputs(&manifest, &result)?;
    let hash = manifest.hash();
    match a.format {
        Format::Json => report::write_json(
            out,
            &json!({
                "experiment": manifest.id(),
                "sha256": hash,
                "records": result.num_records(),
                "files": files,
            }),
        ),
        f => {
            let mut rows = vec![
                vec![json!("experiment"), json!(manifest.id())],
                vec![json!("sha256"), json!(hash)],
                vec![json!("records"), json!(result.num_records())],
            ];
            rows.extend(files.iter().map(|p| vec![json!("file"), json!(p.display().to_string())]));
            if f == Format::Csv {
                report::write_csv(out, &["key", "value"], &rows)
            } else {
                report::write_table(out, &["key", "value"], &rows)
            }
        }
    }
}

pub fn cmd_dataset_check(a: &DatasetCheckArgs, out: &mut dyn Write) -> Result<()> {
    let format = GermanFormat {
        delimiter: a.delimiter,
        ..GermanFormat::default()
    };
    let data = ingest_german_credit(&a.path, &format)?;
    let housing = data.housing.labels().to_vec();
    let sex_age = data.sex_age.labels();
    let mut cells = vec![vec![0usize; housing.len()]; sex_age.len()];
    for (i, _) in data.records.iter().enumerate() {
        cells[data.sex_age.group_of(i)][data.housing.group_of(i)] += 1;
    }
    let mut totals = vec![0usize; housing.len()];
    let mut rows = Vec::new();
    for (label, row) in sex_age.iter().zip(&cells) {
        let mut r = vec![json!(label)];
        r.extend(row.iter().map(|n| json!(n)));
        r.push(json!(row.iter().sum::<usize>()));
        for (t, n) in totals.iter_mut().zip(row) {
            *t += n;
        }
        rows.push(r);
    }
    let mut last = vec![json!("total")];
    last.extend(totals.iter().map(|n| json!(n)));
    last.push(json!(data.len()));
    rows.push(last);
    let mut header = vec!["sex-age"];
    header.extend(housing.iter().map(String::as_str));
    header.push("total");
    match a.format {
        Format::Json => {
            let doc: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            report::write_json(out, &json!({ "records": data.len(), "groups": doc }))
        }
        Format::Csv => report::write_csv(out, &header, &rows),
        Format::Table => report::write_table(out, &header, &rows),
    }
}
