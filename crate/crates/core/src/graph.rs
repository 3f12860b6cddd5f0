//! Affinity graph and (unnormalized) Laplacian of a variation matrix.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("affinity must be square, got {0}×{1}")]
    NotSquare(usize, usize),
    #[error("affinity is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("affinity has a negative entry at ({0}, {1})")]
    Negative(usize, usize),
    #[error("affinity has a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Symmetric nonnegative affinity `(|N| + |N|ᵀ)/2`.
pub fn affinity(n: &DMatrix<f64>) -> DMatrix<f64> {
    let abs = n.abs();
    (&abs + abs.transpose()) * 0.5
}

/// Affinity `S`, degrees `G_ii = Σ_j S_ij` and Laplacian `L = G − S`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    pub affinity: DMatrix<f64>,
    pub degree: DVector<f64>,
    pub laplacian: DMatrix<f64>,
}

impl GraphLaplacian {
    /// Laplacian of the affinity built from a variation matrix.
    pub fn from_variation(n: &DMatrix<f64>) -> Self {
        laplacian(affinity(n)).expect("affinity output is symmetric and nonnegative")
    }

    /// `fᵀ L f` for a single vector.
    pub fn quadratic_form(&self, f: &DVector<f64>) -> f64 {
        f.dot(&(&self.laplacian * f))
    }
}

/// Builds the unnormalized Laplacian of a symmetric nonnegative affinity.
///
/// Symmetry is checked exactly; the affinity is taken by value and kept in
/// the result.
pub fn laplacian(s: DMatrix<f64>) -> Result<GraphLaplacian> {
    let (rows, cols) = s.shape();
    if rows != cols {
        return Err(GraphError::NotSquare(rows, cols));
    }
    for j in 0..cols {
        for i in 0..rows {
            let x = s[(i, j)];
            if !x.is_finite() {
                return Err(GraphError::NonFinite(i, j));
            }
            if x < 0.0 {
                return Err(GraphError::Negative(i, j));
            }
            if x != s[(j, i)] {
                return Err(GraphError::Asymmetric(i, j));
            }
        }
    }
    let degree = DVector::from_iterator(rows, s.row_iter().map(|r| r.sum()));
    let mut laplacian = -&s;
    for i in 0..rows {
        laplacian[(i, i)] += degree[i];
    }
    Ok(GraphLaplacian { affinity: s, degree, laplacian })
}
