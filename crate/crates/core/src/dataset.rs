//! Complete and incomplete multi-view data.
//!
//! Views are stored feature-major: a view with `d` features over `m` samples
//! is a `d × m` matrix, one sample per column. CSV inputs (one sample per row)
//! are transposed on load.
//!
//! An incomplete view keeps only its presented samples together with an
//! [`IndexMatrix`] recording which global sample each column belongs to.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Attempts allowed for the coverage-repair loop in [`apply_missing`].
pub const MASK_REPAIR_BUDGET: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset needs at least 2 views, got {0}")]
    TooFewViews(usize),
    #[error("view {view} has {got} samples, expected {expected}")]
    SampleCountMismatch { view: usize, expected: usize, got: usize },
    #[error("view {0} has no features")]
    EmptyView(usize),
    #[error("view {0} has no presented samples")]
    NoPresentedSamples(usize),
    #[error("cluster count {c} must satisfy 2 <= c <= n = {n}")]
    InvalidClusterCount { c: usize, n: usize },
    #[error("labels have length {got}, expected {expected}")]
    LabelLengthMismatch { expected: usize, got: usize },
    #[error("label {label} at position {position} is outside [0, {c})")]
    LabelOutOfRange { label: usize, position: usize, c: usize },
    #[error("cluster {0} has no samples in the label vector")]
    MissingCluster(usize),
    #[error("non-finite value in view {view} at feature {feature}, sample {sample}")]
    NonFinite { view: usize, feature: usize, sample: usize },
    #[error("sample {0} is not presented in any view")]
    UncoveredSample(usize),
    #[error("view {view} keeps {kept} samples, fewer than the {c} clusters")]
    TooFewPresented { view: usize, kept: usize, c: usize },
    #[error("index rows must be strictly increasing and below {n}: {detail}")]
    InvalidIndex { n: usize, detail: String },
    #[error("missing rate {0} outside [0, 0.9]")]
    InvalidMissingRate(f64),
    #[error("could not find a mask covering every sample after {0} repair attempts")]
    InfeasibleMask(usize),
    #[error("invalid synthetic spec: {0}")]
    InvalidSynthetic(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, DatasetError>;

fn check_labels(labels: &[usize], n: usize, c: usize) -> Result<()> {
    if labels.len() != n {
        return Err(DatasetError::LabelLengthMismatch { expected: n, got: labels.len() });
    }
    let mut seen = vec![false; c];
    for (position, &label) in labels.iter().enumerate() {
        if label >= c {
            return Err(DatasetError::LabelOutOfRange { label, position, c });
        }
        seen[label] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(DatasetError::MissingCluster(missing));
    }
    Ok(())
}

fn check_finite(view: usize, m: &DMatrix<f64>) -> Result<()> {
    for sample in 0..m.ncols() {
        for feature in 0..m.nrows() {
            if !m[(feature, sample)].is_finite() {
                return Err(DatasetError::NonFinite { view, feature, sample });
            }
        }
    }
    Ok(())
}

/// Complete multi-view data: every view observes all `n` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<DMatrix<f64>>,
    labels: Option<Vec<usize>>,
    n_clusters: usize,
}

impl MultiViewDataset {
    pub fn new(views: Vec<DMatrix<f64>>, labels: Option<Vec<usize>>, n_clusters: usize) -> Result<Self> {
        if views.len() < 2 {
            return Err(DatasetError::TooFewViews(views.len()));
        }
        let n = views[0].ncols();
        for (v, view) in views.iter().enumerate() {
            if view.ncols() != n {
                return Err(DatasetError::SampleCountMismatch { view: v, expected: n, got: view.ncols() });
            }
            if view.nrows() == 0 {
                return Err(DatasetError::EmptyView(v));
            }
            check_finite(v, view)?;
        }
        if n_clusters < 2 || n_clusters > n {
            return Err(DatasetError::InvalidClusterCount { c: n_clusters, n });
        }
        if let Some(labels) = &labels {
            check_labels(labels, n, n_clusters)?;
        }
        Ok(Self { views, labels, n_clusters })
    }

    pub fn views(&self) -> &[DMatrix<f64>] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &DMatrix<f64> {
        &self.views[v]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.views[0].ncols()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(|v| v.nrows()).collect()
    }
}

/// Which samples each view observes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresenceMask {
    present: Vec<Vec<bool>>,
}

impl PresenceMask {
    /// Validates coverage (every sample seen by some view) and that every
    /// view keeps at least `n_clusters` samples.
    pub fn new(present: Vec<Vec<bool>>, n_clusters: usize) -> Result<Self> {
        let n = present.first().map_or(0, Vec::len);
        for (v, row) in present.iter().enumerate() {
            if row.len() != n {
                return Err(DatasetError::SampleCountMismatch { view: v, expected: n, got: row.len() });
            }
            let kept = row.iter().filter(|&&p| p).count();
            if kept < n_clusters {
                return Err(DatasetError::TooFewPresented { view: v, kept, c: n_clusters });
            }
        }
        if let Some(i) = (0..n).find(|&i| present.iter().all(|row| !row[i])) {
            return Err(DatasetError::UncoveredSample(i));
        }
        Ok(Self { present })
    }

    pub fn full(n_views: usize, n: usize) -> Self {
        Self { present: vec![vec![true; n]; n_views] }
    }

    pub fn view(&self, v: usize) -> &[bool] {
        &self.present[v]
    }

    pub fn n_views(&self) -> usize {
        self.present.len()
    }
}

/// Selection matrix `W` (`m × n`) stored as the sorted list of presented
/// sample indices. Row `i` of `W` is the basis vector `e_{rows[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMatrix {
    rows: Vec<usize>,
    n: usize,
}

impl IndexMatrix {
    pub fn from_rows(rows: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(w) = rows.windows(2).find(|w| w[0] >= w[1]) {
            return Err(DatasetError::InvalidIndex {
                n,
                detail: format!("{} is followed by {}", w[0], w[1]),
            });
        }
        if let Some(&last) = rows.last() {
            if last >= n {
                return Err(DatasetError::InvalidIndex { n, detail: format!("index {last} out of range") });
            }
        }
        Ok(Self { rows, n })
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: (0..n).collect(), n }
    }

    /// Original-sample index of each presented sample.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Number of presented samples `m`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Total sample count `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn presence(&self) -> Vec<bool> {
        let mut p = vec![false; self.n];
        for &r in &self.rows {
            p[r] = true;
        }
        p
    }

    /// Dense 0/1 matrix `W`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.rows.len(), self.n);
        for (i, &j) in self.rows.iter().enumerate() {
            w[(i, j)] = 1.0;
        }
        w
    }

    /// `Wᵀ A W`: embeds an `m × m` matrix into `n × n`, zeros elsewhere.
    pub fn scatter(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        self.scatter_add(a, 1.0, &mut out);
        out
    }

    /// `out += scale · Wᵀ A W`.
    pub fn scatter_add(&self, a: &DMatrix<f64>, scale: f64, out: &mut DMatrix<f64>) {
        for (b, &j) in self.rows.iter().enumerate() {
            for (a_idx, &i) in self.rows.iter().enumerate() {
                out[(i, j)] += scale * a[(a_idx, b)];
            }
        }
    }

    /// `W A Wᵀ`: the presented `m × m` block of an `n × n` matrix.
    pub fn gather(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.rows.len();
        DMatrix::from_fn(m, m, |i, j| a[(self.rows[i], self.rows[j])])
    }

    /// `U Wᵀ`: keeps the presented columns of a `d × n` matrix.
    pub fn select_columns(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        u.select_columns(self.rows.iter())
    }
}

/// Builds the index matrix for one view from its presence mask.
pub fn build_index_matrix(mask: &[bool]) -> Result<IndexMatrix> {
    let rows: Vec<usize> = mask.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i).collect();
    if rows.is_empty() {
        return Err(DatasetError::NoPresentedSamples(0));
    }
    Ok(IndexMatrix { rows, n: mask.len() })
}

/// Multi-view data with per-view missing samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteDataset {
    views: Vec<DMatrix<f64>>,
    index: Vec<IndexMatrix>,
    n: usize,
    n_clusters: usize,
    labels: Option<Vec<usize>>,
    per: f64,
}

impl IncompleteDataset {
    pub fn new(
        views: Vec<DMatrix<f64>>,
        index: Vec<IndexMatrix>,
        n_clusters: usize,
        labels: Option<Vec<usize>>,
        per: f64,
    ) -> Result<Self> {
        if views.len() < 2 {
            return Err(DatasetError::TooFewViews(views.len()));
        }
        if views.len() != index.len() {
            return Err(DatasetError::Parse {
                path: PathBuf::new(),
                message: format!("{} views but {} index matrices", views.len(), index.len()),
            });
        }
        let n = index[0].n();
        for (v, (x, w)) in views.iter().zip(&index).enumerate() {
            if w.n() != n {
                return Err(DatasetError::SampleCountMismatch { view: v, expected: n, got: w.n() });
            }
            if w.is_empty() {
                return Err(DatasetError::NoPresentedSamples(v));
            }
            if x.ncols() != w.len() {
                return Err(DatasetError::SampleCountMismatch { view: v, expected: w.len(), got: x.ncols() });
            }
            if x.nrows() == 0 {
                return Err(DatasetError::EmptyView(v));
            }
            check_finite(v, x)?;
        }
        let mut covered = vec![false; n];
        for w in &index {
            for &r in w.rows() {
                covered[r] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(DatasetError::UncoveredSample(i));
        }
        if n_clusters < 2 || n_clusters > n {
            return Err(DatasetError::InvalidClusterCount { c: n_clusters, n });
        }
        if let Some(labels) = &labels {
            check_labels(labels, n, n_clusters)?;
        }
        Ok(Self { views, index, n, n_clusters, labels, per })
    }

    /// Restricts every view of `data` to the samples marked present in `mask`.
    pub fn from_mask(data: &MultiViewDataset, mask: &PresenceMask, per: f64) -> Result<Self> {
        if mask.n_views() != data.n_views() {
            return Err(DatasetError::Parse {
                path: PathBuf::new(),
                message: format!("mask has {} views, data has {}", mask.n_views(), data.n_views()),
            });
        }
        let mut views = Vec::with_capacity(data.n_views());
        let mut index = Vec::with_capacity(data.n_views());
        for v in 0..data.n_views() {
            let w = build_index_matrix(mask.view(v)).map_err(|_| DatasetError::NoPresentedSamples(v))?;
            if w.n() != data.n_samples() {
                return Err(DatasetError::SampleCountMismatch {
                    view: v,
                    expected: data.n_samples(),
                    got: w.n(),
                });
            }
            views.push(w.select_columns(data.view(v)));
            index.push(w);
        }
        Self::new(views, index, data.n_clusters(), data.labels.clone(), per)
    }

    pub fn views(&self) -> &[DMatrix<f64>] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &DMatrix<f64> {
        &self.views[v]
    }

    pub fn index(&self, v: usize) -> &IndexMatrix {
        &self.index[v]
    }

    pub fn indices(&self) -> &[IndexMatrix] {
        &self.index
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn per(&self) -> f64 {
        self.per
    }

    pub fn presence(&self) -> PresenceMask {
        PresenceMask { present: self.index.iter().map(IndexMatrix::presence).collect() }
    }

    /// Copy with every presented sample scaled to unit Euclidean norm
    /// (zero columns stay zero).
    pub fn normalized_samples(&self) -> Self {
        let mut out = self.clone();
        for x in &mut out.views {
            for mut col in x.column_iter_mut() {
                let norm = col.norm();
                if norm > 0.0 {
                    col /= norm;
                }
            }
        }
        out
    }
}

/// Deletes `round(per·n)` samples from every view, uniformly at random, then
/// repairs the mask until every sample is presented by at least one view.
pub fn apply_missing(data: &MultiViewDataset, per: f64, seed: u64) -> Result<IncompleteDataset> {
    if !(0.0..=0.9).contains(&per) {
        return Err(DatasetError::InvalidMissingRate(per));
    }
    let n = data.n_samples();
    let n_views = data.n_views();
    let c = data.n_clusters();
    let deleted = (per * n as f64).round() as usize;
    if n - deleted < c {
        return Err(DatasetError::TooFewPresented { view: 0, kept: n - deleted, c });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = vec![vec![true; n]; n_views];
    for row in present.iter_mut() {
        for i in index::sample(&mut rng, n, deleted) {
            row[i] = false;
        }
    }

    let mut attempts = 0;
    loop {
        let coverage: Vec<usize> = (0..n).map(|i| present.iter().filter(|row| row[i]).count()).collect();
        let uncovered: Vec<usize> = (0..n).filter(|&i| coverage[i] == 0).collect();
        if uncovered.is_empty() {
            break;
        }
        if attempts == MASK_REPAIR_BUDGET {
            return Err(DatasetError::InfeasibleMask(MASK_REPAIR_BUDGET));
        }
        attempts += 1;
        let mut coverage = coverage;
        for i in uncovered {
            let v = rng.random_range(0..n_views);
            // swap partner: present in v and covered by some other view too
            let candidates: Vec<usize> = (0..n).filter(|&j| present[v][j] && coverage[j] >= 2).collect();
            if candidates.is_empty() {
                continue;
            }
            let j = candidates[rng.random_range(0..candidates.len())];
            present[v][i] = true;
            present[v][j] = false;
            coverage[i] += 1;
            coverage[j] -= 1;
        }
    }

    let mask = PresenceMask::new(present, c)?;
    IncompleteDataset::from_mask(data, &mask, per)
}

/// Parameters of the Gaussian-blob generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub c: usize,
    pub dims: Vec<usize>,
    pub sep: f64,
    pub noise: f64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DatasetError::InvalidSynthetic(m));
        if self.c < 2 {
            return bad(format!("c = {} must be at least 2", self.c));
        }
        if self.n < self.c {
            return bad(format!("n = {} must be at least c = {}", self.n, self.c));
        }
        if self.dims.len() < 2 {
            return bad(format!("need at least 2 views, got {}", self.dims.len()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return bad(format!("view dimension {d} must be at least 2"));
        }
        if !(self.sep > 0.0) {
            return bad(format!("sep = {} must be positive", self.sep));
        }
        if !(self.noise >= 0.0) {
            return bad(format!("noise = {} must be non-negative", self.noise));
        }
        Ok(())
    }
}

/// One isotropic Gaussian blob per (cluster, view); sample `i` belongs to
/// cluster `⌊i·c/n⌋` in every view.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<MultiViewDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..spec.n).map(|i| i * spec.c / spec.n).collect();
    let mut views = Vec::with_capacity(spec.dims.len());
    for &d in &spec.dims {
        let means: Vec<Vec<f64>> = (0..spec.c)
            .map(|_| {
                loop {
                    let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        break g.into_iter().map(|x| spec.sep * x / norm).collect();
                    }
                }
            })
            .collect();
        let mut view = DMatrix::zeros(d, spec.n);
        for (i, &k) in labels.iter().enumerate() {
            for f in 0..d {
                let eps: f64 = rng.sample(StandardNormal);
                view[(f, i)] = means[k][f] + spec.noise * eps;
            }
        }
        views.push(view);
    }
    MultiViewDataset::new(views, Some(labels), spec.c)
}

/// Either kind of dataset, as produced by [`load_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedDataset {
    Complete(MultiViewDataset),
    Incomplete(IncompleteDataset),
}

impl LoadedDataset {
    pub fn labels(&self) -> Option<&[usize]> {
        match self {
            Self::Complete(d) => d.labels(),
            Self::Incomplete(d) => d.labels(),
        }
    }
}

/// On-disk manifest describing a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub views: Vec<ManifestView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
    pub clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestView {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presence: Option<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

fn parse_err(path: &Path, message: impl Into<String>) -> DatasetError {
    DatasetError::Parse { path: path.to_path_buf(), message: message.into() }
}

/// Reads a headerless CSV (rows = samples) into a feature-major matrix.
fn read_view_csv(path: &Path, view: usize) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(path, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                let value: f64 = field
                    .parse()
                    .map_err(|_| parse_err(path, format!("row {r}, column {col}: cannot parse {field:?}")))?;
                if !value.is_finite() {
                    return Err(DatasetError::NonFinite { view, feature: col, sample: r });
                }
                Ok(value)
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(path, format!("row {r} has {} columns, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, "no rows"));
    }
    let d = rows[0].len();
    Ok(DMatrix::from_fn(d, rows.len(), |f, i| rows[i][f]))
}

fn read_integers(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| parse_err(path, format!("line {}: not an index: {:?}", i + 1, l)))
        })
        .collect()
}

/// Loads a dataset from a JSON manifest. Relative paths resolve against the
/// manifest's directory. If any view lists a presence file the result is an
/// [`IncompleteDataset`]; views without one are treated as complete.
pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<LoadedDataset> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(io_err(manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| parse_err(manifest_path, e.to_string()))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &str| {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };

    let mut views = Vec::with_capacity(manifest.views.len());
    let mut presence = Vec::with_capacity(manifest.views.len());
    for (v, entry) in manifest.views.iter().enumerate() {
        views.push(read_view_csv(&resolve(&entry.path), v)?);
        presence.push(match &entry.presence {
            Some(p) => Some(read_integers(&resolve(p))?),
            None => None,
        });
    }
    let labels = match &manifest.labels {
        Some(p) => Some(read_integers(&resolve(p))?),
        None => None,
    };

    if presence.iter().all(Option::is_none) {
        return MultiViewDataset::new(views, labels, manifest.clusters).map(LoadedDataset::Complete);
    }

    // total sample count: labels if present, otherwise the largest complete
    // view or the largest referenced index
    let n = labels
        .as_ref()
        .map(Vec::len)
        .or_else(|| views.iter().zip(&presence).filter(|(_, p)| p.is_none()).map(|(x, _)| x.ncols()).max())
        .unwrap_or_else(|| {
            presence.iter().flatten().flat_map(|rows| rows.last().copied()).max().map_or(0, |m| m + 1)
        });
    let mut index = Vec::with_capacity(views.len());
    for (v, rows) in presence.into_iter().enumerate() {
        let w = match rows {
            Some(rows) => IndexMatrix::from_rows(rows, n)?,
            None => IndexMatrix::identity(n),
        };
        if views[v].ncols() != w.len() {
            return Err(DatasetError::SampleCountMismatch { view: v, expected: w.len(), got: views[v].ncols() });
        }
        index.push(w);
    }
    let per = index.iter().map(|w| 1.0 - w.len() as f64 / n as f64).sum::<f64>() / index.len() as f64;
    IncompleteDataset::new(views, index, manifest.clusters, labels, per).map(LoadedDataset::Incomplete)
}

fn write_view_csv(path: &Path, x: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for col in x.column_iter() {
        let line: Vec<String> = col.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

fn write_integers(path: &Path, values: &[usize]) -> Result<()> {
    let mut out = String::new();
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Writes `manifest.json` plus one CSV per view (and presence/label files) into `dir`.
pub fn save_dataset(data: &LoadedDataset, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (views, index, labels, clusters): (&[DMatrix<f64>], Option<&[IndexMatrix]>, _, _) = match data {
        LoadedDataset::Complete(d) => (d.views(), None, d.labels(), d.n_clusters()),
        LoadedDataset::Incomplete(d) => (d.views(), Some(d.indices()), d.labels(), d.n_clusters()),
    };
    let mut entries = Vec::with_capacity(views.len());
    for (v, x) in views.iter().enumerate() {
        let name = format!("view{v}.csv");
        write_view_csv(&dir.join(&name), x)?;
        let presence = match index {
            Some(index) => {
                let pname = format!("view{v}.presence");
                write_integers(&dir.join(&pname), index[v].rows())?;
                Some(pname)
            }
            None => None,
        };
        entries.push(ManifestView { path: name, presence });
    }
    let label_file = match labels {
        Some(l) => {
            write_integers(&dir.join("labels.txt"), l)?;
            Some("labels.txt".to_string())
        }
        None => None,
    };
    let manifest = Manifest { views: entries, labels: label_file, clusters };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| parse_err(&path, e.to_string()))?;
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}
