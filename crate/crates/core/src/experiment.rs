//! Missing-rate sweeps: for every missing rate and repeat, draw a mask, run
//! each method on the same incomplete data, score against ground truth, and
//! aggregate. Reports are written as `results.csv`, `summary.json` and one
//! convergence-trace CSV per solver run.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::clustering::{self, mix_seed};
use crate::dataset::{self, IncompleteDataset, LoadedDataset, MultiViewDataset, SyntheticSpec};
use crate::metrics::{self, MetricRecord};
use crate::solver::{self, ConvergenceTrace, Hyperparams};

pub const DEFAULT_PER_GRID: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const DEFAULT_REPEATS: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dataset has no ground-truth labels, which are needed for scoring")]
    MissingLabels,
    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

fn io_error(path: &Path, e: impl fmt::Display) -> ExperimentError {
    ExperimentError::Io { path: path.to_path_buf(), message: e.to_string() }
}

/// A clustering method that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    V3h,
    Ck,
    Cs,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::V3h, Method::Ck, Method::Cs];

    pub fn name(self) -> &'static str {
        match self {
            Method::V3h => "v3h",
            Method::Ck => "ck",
            Method::Cs => "cs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v3h" => Ok(Method::V3h),
            "ck" => Ok(Method::Ck),
            "cs" => Ok(Method::Cs),
            other => Err(ExperimentError::Config(format!("unknown method {other:?} (expected v3h, ck or cs)"))),
        }
    }
}

/// Parses `n=..,c=..,views=d1,d2,..,sep=..,noise=..`. Bare numbers after
/// `views=` continue the dimension list.
pub fn parse_synthetic_spec(text: &str) -> Result<SyntheticSpec> {
    let err = |m: String| ExperimentError::Config(format!("synthetic spec {text:?}: {m}"));
    let mut fields: Vec<(String, Vec<String>)> = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.split_once('=') {
            Some((key, value)) => fields.push((key.trim().to_ascii_lowercase(), vec![value.trim().to_string()])),
            None => match fields.last_mut() {
                Some((key, values)) if key == "views" => values.push(token.to_string()),
                _ => return Err(err(format!("unexpected token {token:?}"))),
            },
        }
    }
    let get = |name: &str| -> Result<&Vec<String>> {
        let mut found = fields.iter().filter(|(k, _)| k == name);
        let first = found.next().ok_or_else(|| err(format!("missing {name}")))?;
        if found.next().is_some() {
            return Err(err(format!("{name} given twice")));
        }
        Ok(&first.1)
    };
    if let Some((key, _)) = fields.iter().find(|(k, _)| !["n", "c", "views", "sep", "noise"].contains(&k.as_str())) {
        return Err(err(format!("unknown key {key:?}")));
    }
    let single = |name: &str| -> Result<String> {
        let v = get(name)?;
        if v.len() != 1 {
            return Err(err(format!("{name} takes a single value")));
        }
        Ok(v[0].clone())
    };
    let int = |name: &str| -> Result<usize> {
        single(name)?.parse().map_err(|_| err(format!("{name} must be a non-negative integer")))
    };
    let float = |name: &str| -> Result<f64> { single(name)?.parse().map_err(|_| err(format!("{name} must be a number"))) };
    let dims = get("views")?
        .iter()
        .map(|d| d.parse().map_err(|_| err(format!("view dimension {d:?} is not an integer"))))
        .collect::<Result<Vec<usize>>>()?;
    Ok(SyntheticSpec { n: int("n")?, c: int("c")?, dims, sep: float("sep")?, noise: float("noise")? })
}

/// Where the data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Manifest(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub methods: Vec<Method>,
    pub per_grid: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    /// Output directory; nothing is written when `None`.
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(source: DataSource) -> Self {
        Self {
            source,
            methods: Method::ALL.to_vec(),
            per_grid: DEFAULT_PER_GRID.to_vec(),
            repeats: DEFAULT_REPEATS,
            seed: 0,
            hyperparams: Hyperparams::default(),
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(ExperimentError::Config("no methods selected".into()));
        }
        if self.per_grid.is_empty() {
            return Err(ExperimentError::Config("empty missing-rate grid".into()));
        }
        if let Some(per) = self.per_grid.iter().find(|p| !(0.0..=0.9).contains(*p)) {
            return Err(ExperimentError::Config(format!("missing rate {per} outside [0, 0.9]")));
        }
        if self.repeats == 0 {
            return Err(ExperimentError::Config("repeats must be at least 1".into()));
        }
        self.hyperparams.validate().map_err(|e| ExperimentError::Config(e.to_string()))
    }
}

/// One (method, missing rate, repeat) cell. Failed runs carry NaN metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub per: f64,
    pub repeat: usize,
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    /// Solver iterations (0 for the baselines and for failed runs).
    pub iterations: usize,
    pub wall_time_s: f64,
}

/// Mean and sample standard deviation over the successful repeats of one
/// (method, missing rate) pair; `None` when every repeat failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub per: f64,
    pub acc_mean: Option<f64>,
    pub acc_std: Option<f64>,
    pub nmi_mean: Option<f64>,
    pub nmi_std: Option<f64>,
    pub purity_mean: Option<f64>,
    pub purity_std: Option<f64>,
    pub runs: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub method: Method,
    pub per: f64,
    pub repeat: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub per: f64,
    pub repeat: usize,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<Failure>,
    pub traces: Vec<RunTrace>,
}

/// Seed for the mask (and every method's randomness) of one sweep cell.
pub fn cell_seed(base: u64, per: f64, repeat: usize) -> u64 {
    base ^ mix_seed(per.to_bits(), repeat as u64)
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() == 1 {
        0.0
    } else {
        (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (Some(mean), Some(std))
}

/// Aggregates records per (method, missing rate), in first-appearance order.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(Method, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(m, p)| m == r.method && p.to_bits() == r.per.to_bits()) {
            keys.push((r.method, r.per));
        }
    }
    keys.into_iter()
        .map(|(method, per)| {
            let cell: Vec<&RunRecord> =
                records.iter().filter(|r| r.method == method && r.per.to_bits() == per.to_bits()).collect();
            let ok: Vec<&&RunRecord> = cell.iter().filter(|r| !r.acc.is_nan()).collect();
            let (acc_mean, acc_std) = mean_std(&ok.iter().map(|r| r.acc).collect::<Vec<_>>());
            let (nmi_mean, nmi_std) = mean_std(&ok.iter().map(|r| r.nmi).collect::<Vec<_>>());
            let (purity_mean, purity_std) = mean_std(&ok.iter().map(|r| r.purity).collect::<Vec<_>>());
            Aggregate {
                method,
                per,
                acc_mean,
                acc_std,
                nmi_mean,
                nmi_std,
                purity_mean,
                purity_std,
                runs: cell.len(),
                failures: cell.len() - ok.len(),
            }
        })
        .collect()
}

enum Source {
    Complete(MultiViewDataset),
    Fixed(IncompleteDataset),
}

fn load_source(config: &ExperimentConfig) -> Result<Source> {
    match &config.source {
        DataSource::Synthetic(spec) => Ok(Source::Complete(dataset::generate_synthetic(spec, config.seed)?)),
        DataSource::Manifest(path) => Ok(match dataset::load_dataset(path)? {
            LoadedDataset::Complete(d) => Source::Complete(d),
            LoadedDataset::Incomplete(d) => Source::Fixed(d),
        }),
    }
}

struct Outcome {
    labels: Vec<usize>,
    iterations: usize,
    trace: Option<ConvergenceTrace>,
}

fn run_method(method: Method, data: &IncompleteDataset, params: &Hyperparams, seed: u64) -> std::result::Result<Outcome, String> {
    match method {
        Method::V3h => {
            let params = Hyperparams { seed, ..params.clone() };
            let result = solver::fit(data, &params).map_err(|e| e.to_string())?;
            let c = params.clusters.unwrap_or(data.n_clusters());
            let labels = clustering::labels_from_h(&result.state.h, c, seed).map_err(|e| e.to_string())?;
            Ok(Outcome { labels, iterations: result.iterations(), trace: Some(result.trace) })
        }
        Method::Ck => baselines::concat_kmeans(data, seed)
            .map(|labels| Outcome { labels, iterations: 0, trace: None })
            .map_err(|e| e.to_string()),
        Method::Cs => baselines::concat_spectral(data, seed)
            .map(|labels| Outcome { labels, iterations: 0, trace: None })
            .map_err(|e| e.to_string()),
    }
}

/// Runs the sweep and, when `out_dir` is set, writes the report there.
///
/// With a manifest that already carries presence files, the stored mask is
/// used for every repeat and the grid is replaced by its observed missing rate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let source = load_source(config)?;
    let labels: Vec<usize> = match &source {
        Source::Complete(d) => d.labels(),
        Source::Fixed(d) => d.labels(),
    }
    .ok_or(ExperimentError::MissingLabels)?
    .to_vec();
    let grid = match &source {
        Source::Complete(_) => config.per_grid.clone(),
        Source::Fixed(d) => vec![d.per()],
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut traces = Vec::new();
    for &per in &grid {
        for repeat in 0..config.repeats {
            let seed = cell_seed(config.seed, per, repeat);
            let data = match &source {
                Source::Complete(d) => dataset::apply_missing(d, per, seed),
                Source::Fixed(d) => Ok(d.clone()),
            };
            for &method in &config.methods {
                let start = Instant::now();
                let outcome = data
                    .as_ref()
                    .map_err(|e| e.to_string())
                    .and_then(|data| run_method(method, data, &config.hyperparams, seed));
                let scored = outcome.and_then(|o| {
                    let m = metrics::evaluate(&o.labels, &labels).map_err(|e| e.to_string())?;
                    Ok((m, o))
                });
                let wall_time_s = start.elapsed().as_secs_f64();
                let (m, iterations) = match scored {
                    Ok((m, o)) => {
                        if let Some(trace) = o.trace {
                            traces.push(RunTrace { per, repeat, trace });
                        }
                        (m, o.iterations)
                    }
                    Err(error) => {
                        failures.push(Failure { method, per, repeat, error });
                        (MetricRecord::nan(), 0)
                    }
                };
                records.push(RunRecord {
                    method,
                    per,
                    repeat,
                    acc: m.acc,
                    nmi: m.nmi,
                    purity: m.purity,
                    iterations,
                    wall_time_s,
                });
            }
        }
    }
    let report = ExperimentReport { config: config.clone(), aggregates: aggregate(&records), records, failures, traces };
    if let Some(dir) = &config.out_dir {
        emit_report(&report, dir)?;
    }
    Ok(report)
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    aggregates: &'a [Aggregate],
    failures: &'a [Failure],
}

/// File name of the trace CSV of one solver run.
pub fn trace_file_name(per: f64, repeat: usize) -> String {
    format!("v3h_per{per}_rep{repeat}.csv")
}

/// Writes `results.csv`, `summary.json` and `traces/*.csv` into `out_dir`.
pub fn emit_report(report: &ExperimentReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let results = out_dir.join("results.csv");
    write_results_csv(&report.records, &results)?;

    let summary_path = out_dir.join("summary.json");
    let summary = Summary { config: &report.config, aggregates: &report.aggregates, failures: &report.failures };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| io_error(&summary_path, e))?;
    fs::write(&summary_path, text + "\n").map_err(|e| io_error(&summary_path, e))?;

    let trace_dir = out_dir.join("traces");
    fs::create_dir_all(&trace_dir).map_err(|e| io_error(&trace_dir, e))?;
    for t in &report.traces {
        write_trace_csv(&t.trace, &trace_dir.join(trace_file_name(t.per, t.repeat)))?;
    }
    Ok(())
}

/// Writes records as CSV with the columns
/// `method,per,repeat,acc,nmi,purity,iterations,wall_time_s`.
pub fn write_results_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    writer
        .write_record(["method", "per", "repeat", "acc", "nmi", "purity", "iterations", "wall_time_s"])
        .map_err(|e| io_error(path, e))?;
    for r in records {
        writer
            .write_record([
                r.method.to_string(),
                r.per.to_string(),
                r.repeat.to_string(),
                r.acc.to_string(),
                r.nmi.to_string(),
                r.purity.to_string(),
                r.iterations.to_string(),
                r.wall_time_s.to_string(),
            ])
            .map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}

/// Parses a `results.csv` written by [`write_results_csv`].
pub fn read_results_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    reader.deserialize().map(|r| r.map_err(|e| io_error(path, e))).collect()
}

/// Writes one row per iteration:
/// `iteration,objective_ratio,relative_change,numerator,denominator,
/// max_self_residual,max_decomposition_residual,max_row_sum_violation,omega`.
pub fn write_trace_csv(trace: &ConvergenceTrace, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    writer
        .write_record([
            "iteration",
            "objective_ratio",
            "relative_change",
            "numerator",
            "denominator",
            "max_self_residual",
            "max_decomposition_residual",
            "max_row_sum_violation",
            "omega",
        ])
        .map_err(|e| io_error(path, e))?;
    for r in &trace.records {
        writer
            .write_record([
                r.iteration.to_string(),
                r.objective_ratio.to_string(),
                r.relative_change.map(|x| x.to_string()).unwrap_or_default(),
                r.numerator.to_string(),
                r.denominator.to_string(),
                r.max_self_residual.to_string(),
                r.max_decomposition_residual.to_string(),
                r.max_row_sum_violation.to_string(),
                r.omega.to_string(),
            ])
            .map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}
