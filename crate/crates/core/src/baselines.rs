//! Single-view reference methods: mean-impute the missing samples, z-score and
//! concatenate all views, then cluster with k-means or spectral clustering.

use nalgebra::DMatrix;

use crate::clustering::{self, ClusteringError, DEFAULT_RESTARTS};
use crate::dataset::{DatasetError, IncompleteDataset, MultiViewDataset};
use crate::graph::{self, GraphError};
use crate::linalg;

/// Feature rows whose standard deviation is at or below this are dropped.
pub const ZERO_VARIANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("eigen-decomposition of the affinity Laplacian failed")]
    Eigen,
}

pub type Result<T> = std::result::Result<T, BaselineError>;

/// Fills every missing sample of a view with the mean of its presented samples.
pub fn mean_impute(data: &IncompleteDataset) -> Result<MultiViewDataset> {
    let n = data.n_samples();
    let views = data
        .views()
        .iter()
        .zip(data.indices())
        .map(|(x, w)| {
            let mean = x.column_mean();
            let mut full = DMatrix::zeros(x.nrows(), n);
            for j in 0..n {
                full.set_column(j, &mean);
            }
            for (col, &j) in w.rows().iter().enumerate() {
                full.set_column(j, &x.column(col));
            }
            full
        })
        .collect();
    Ok(MultiViewDataset::new(views, data.labels().map(<[usize]>::to_vec), data.n_clusters())?)
}

/// Z-scores every feature row of every view (population standard deviation),
/// dropping constant rows, and stacks the views into one `(Σ d) × n` matrix.
pub fn standardized_concatenation(data: &MultiViewDataset) -> DMatrix<f64> {
    let n = data.n_samples();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for view in data.views() {
        for row in view.row_iter() {
            let mean = row.mean();
            let var = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            if std <= ZERO_VARIANCE {
                continue;
            }
            rows.push(row.iter().map(|x| (x - mean) / std).collect());
        }
    }
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j])
}

fn samples_as_rows(data: &IncompleteDataset) -> Result<DMatrix<f64>> {
    Ok(standardized_concatenation(&mean_impute(data)?).transpose())
}

/// Concatenation + k-means.
pub fn concat_kmeans(data: &IncompleteDataset, seed: u64) -> Result<Vec<usize>> {
    let points = samples_as_rows(data)?;
    Ok(clustering::kmeans(&points, data.n_clusters(), DEFAULT_RESTARTS, seed)?.labels)
}

/// Gaussian affinity `exp(−‖x_i − x_j‖²/(2σ²))` between rows, with `σ` the
/// median pairwise distance (1 if all points coincide).
pub fn gaussian_affinity(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.nrows();
    let sq = linalg::row_sq_distances(points);
    let mut distances: Vec<f64> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| sq[(i, j)].sqrt()).collect();
    let sigma = if distances.is_empty() {
        1.0
    } else {
        distances.sort_by(f64::total_cmp);
        let mid = distances.len() / 2;
        let median = if distances.len() % 2 == 0 { 0.5 * (distances[mid - 1] + distances[mid]) } else { distances[mid] };
        if median > 0.0 {
            median
        } else {
            1.0
        }
    };
    sq.map(|d| (-d / (2.0 * sigma * sigma)).exp())
}

/// Concatenation + spectral clustering on the Gaussian-affinity Laplacian.
pub fn concat_spectral(data: &IncompleteDataset, seed: u64) -> Result<Vec<usize>> {
    let points = samples_as_rows(data)?;
    let c = data.n_clusters();
    let lap = graph::laplacian(gaussian_affinity(&points))?;
    let (_, embedding) = linalg::smallest_eigenvectors(&lap.laplacian, c).ok_or(BaselineError::Eigen)?;
    Ok(clustering::labels_from_h(&embedding, c, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{apply_missing, build_index_matrix, generate_synthetic, IndexMatrix, SyntheticSpec};
    use crate::metrics::accuracy;

    fn blobs(views: usize) -> MultiViewDataset {
        let spec = SyntheticSpec { n: 30, c: 2, dims: vec![3; views.max(2)], sep: 6.0, noise: 0.2 };
        generate_synthetic(&spec, 21).unwrap()
    }

    #[test]
    fn impute_is_identity_without_missing() {
        let data = blobs(2);
        let inc = apply_missing(&data, 0.0, 0).unwrap();
        assert_eq!(mean_impute(&inc).unwrap().views(), data.views());
    }

    #[test]
    fn impute_hand_mean() {
        let x0 = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 3.0, 0.0]);
        let x1 = DMatrix::from_column_slice(1, 3, &[1.0, 2.0, 3.0]);
        let w0 = build_index_matrix(&[true, false, true]).unwrap();
        let inc = IncompleteDataset::new(vec![x0, x1], vec![w0, IndexMatrix::identity(3)], 2, None, 0.0).unwrap();
        let full = mean_impute(&inc).unwrap();
        assert_eq!(full.view(0).column(1).as_slice(), &[2.0, 0.0]);
        assert_eq!(full.view(0).column(0).as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn impute_preserves_presented_columns_and_means() {
        let data = blobs(3);
        let inc = apply_missing(&data, 0.4, 5).unwrap();
        let full = mean_impute(&inc).unwrap();
        for v in 0..3 {
            let w = inc.index(v);
            assert_eq!(w.select_columns(full.view(v)), *inc.view(v));
            let diff = full.view(v).column_mean() - inc.view(v).column_mean();
            assert!(diff.amax() < 1e-12);
        }
    }

    #[test]
    fn zero_variance_rows_are_dropped() {
        let mut x = DMatrix::from_fn(3, 6, |i, j| (i * 6 + j) as f64);
        x.row_mut(1).fill(4.0);
        let data = MultiViewDataset::new(vec![x, DMatrix::from_element(2, 6, 1.0)], None, 2).unwrap();
        let stacked = standardized_concatenation(&data);
        assert_eq!(stacked.nrows(), 2);
        for row in stacked.row_iter() {
            assert!(row.mean().abs() < 1e-12);
        }
    }

    #[test]
    fn kmeans_baseline_separates_blobs() {
        let data = blobs(2);
        let inc = apply_missing(&data, 0.0, 0).unwrap();
        let labels = concat_kmeans(&inc, 3).unwrap();
        assert_eq!(accuracy(&labels, data.labels().unwrap()).unwrap(), 1.0);
        assert_eq!(labels, concat_kmeans(&inc, 3).unwrap());
    }

    #[test]
    fn spectral_baseline_separates_blobs() {
        let data = blobs(2);
        let inc = apply_missing(&data, 0.0, 0).unwrap();
        let labels = concat_spectral(&inc, 3).unwrap();
        assert_eq!(accuracy(&labels, data.labels().unwrap()).unwrap(), 1.0);
        assert_eq!(labels, concat_spectral(&inc, 3).unwrap());
    }

    #[test]
    fn affinity_has_unit_diagonal() {
        let s = gaussian_affinity(&DMatrix::from_fn(5, 2, |i, j| (i + 2 * j) as f64));
        assert!((0..5).all(|i| s[(i, i)] == 1.0));
        assert_eq!(s, s.transpose());
    }

    #[test]
    fn baselines_produce_valid_labels_over_missing_grid() {
        let data = blobs(3);
        for per in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5] {
            let inc = apply_missing(&data, per, 7).unwrap();
            for labels in [concat_kmeans(&inc, 1).unwrap(), concat_spectral(&inc, 1).unwrap()] {
                assert_eq!(labels.len(), 30);
                assert!(labels.iter().all(|&l| l < 2));
            }
        }
    }
}
