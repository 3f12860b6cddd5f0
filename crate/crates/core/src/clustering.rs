//! Hard labels from embeddings: k-means++ seeded Lloyd iterations and the
//! row-normalized spectral rounding used on the consensus indicator.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_RESTARTS: usize = 10;
pub const MAX_LLOYD_ITERATIONS: usize = 300;
pub const CENTROID_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClusteringError {
    #[error("cannot form {c} clusters from {n} points")]
    TooFewPoints { n: usize, c: usize },
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("restart count must be at least 1")]
    ZeroRestarts,
    #[error("points contain non-finite values")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, ClusteringError>;

/// Outcome of the best k-means restart.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    /// `c × dim`, one centroid per row.
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squares of the final assignment.
    pub wcss: f64,
    /// WCSS after each assignment step of the winning restart.
    pub wcss_history: Vec<f64>,
}

/// Derives an independent stream seed (splitmix64 finalizer).
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, k: usize) -> f64 {
    (0..points.ncols()).map(|f| (points[(i, f)] - centroids[(k, f)]).powi(2)).sum()
}

fn plus_plus_seeding(points: &DMatrix<f64>, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, dim) = points.shape();
    let mut centroids = DMatrix::zeros(c, dim);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centroids.set_row(0, &points.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centroids, 0)).collect();
    for k in 1..c {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            // all remaining points coincide with chosen centroids
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.set_row(k, &points.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centroids, k));
        }
    }
    centroids
}

fn assign(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize], dists: &mut [f64]) -> f64 {
    let c = centroids.nrows();
    let mut wcss = 0.0;
    for i in 0..points.nrows() {
        let mut best = (f64::INFINITY, 0);
        for k in 0..c {
            let d = sq_dist(points, i, centroids, k);
            if d < best.0 {
                best = (d, k);
            }
        }
        labels[i] = best.1;
        dists[i] = best.0;
        wcss += best.0;
    }
    wcss
}

/// Moves the farthest point of a multi-member cluster into each empty cluster.
/// Returns whether anything changed.
fn repair_empty(labels: &mut [usize], dists: &mut [f64], c: usize) -> bool {
    let mut changed = false;
    loop {
        let mut sizes = vec![0usize; c];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return changed;
        };
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
            .expect("n >= c guarantees a cluster with several members");
        labels[donor] = empty;
        dists[donor] = 0.0;
        changed = true;
    }
}

fn lloyd(points: &DMatrix<f64>, c: usize, rng: &mut ChaCha8Rng) -> KMeansResult {
    let (n, dim) = points.shape();
    let mut centroids = plus_plus_seeding(points, c, rng);
    let mut labels = vec![0; n];
    let mut dists = vec![0.0; n];
    let mut history = Vec::new();
    let mut wcss = assign(points, &centroids, &mut labels, &mut dists);
    if repair_empty(&mut labels, &mut dists, c) {
        wcss = dists.iter().sum();
    }
    history.push(wcss);
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut next = DMatrix::zeros(c, dim);
        let mut sizes = vec![0usize; c];
        for i in 0..n {
            sizes[labels[i]] += 1;
            let mut row = next.row_mut(labels[i]);
            row += points.row(i);
        }
        for k in 0..c {
            let mut row = next.row_mut(k);
            row /= sizes[k] as f64;
        }
        let movement = (&next - &centroids).amax();
        centroids = next;
        wcss = assign(points, &centroids, &mut labels, &mut dists);
        if repair_empty(&mut labels, &mut dists, c) {
            wcss = dists.iter().sum();
        }
        history.push(wcss);
        if movement < CENTROID_TOL {
            break;
        }
    }
    KMeansResult { labels, centroids, wcss, wcss_history: history }
}

/// Clusters the rows of `points` into `c` groups, keeping the restart with
/// the lowest within-cluster sum of squares.
pub fn kmeans(points: &DMatrix<f64>, c: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let n = points.nrows();
    if c == 0 {
        return Err(ClusteringError::ZeroClusters);
    }
    if restarts == 0 {
        return Err(ClusteringError::ZeroRestarts);
    }
    if n < c {
        return Err(ClusteringError::TooFewPoints { n, c });
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(ClusteringError::NonFinite);
    }
    let mut best: Option<KMeansResult> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, r as u64));
        let run = lloyd(points, c, &mut rng);
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Scales every row to unit Euclidean length; zero rows stay zero.
pub fn normalize_rows(h: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = h.clone();
    for mut row in out.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    out
}

/// Hard labels from an `n × c` spectral embedding: row normalization then
/// k-means with the default number of restarts.
pub fn labels_from_h(h: &DMatrix<f64>, c: usize, seed: u64) -> Result<Vec<usize>> {
    Ok(kmeans(&normalize_rows(h), c, DEFAULT_RESTARTS, seed)?.labels)
}
