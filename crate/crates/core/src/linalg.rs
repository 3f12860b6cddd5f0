//! Small dense linear-algebra helpers shared by the solver, the norms and the
//! baselines. Everything here works on `nalgebra::DMatrix<f64>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

const SVD_EPS: f64 = 1e-14;
const EIGEN_EPS: f64 = 1e-14;
const MAX_SWEEPS: usize = 10_000;

/// Thin SVD with singular values sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl SortedSvd {
    pub fn compute(a: &DMatrix<f64>) -> Option<Self> {
        let svd = SVD::try_new(a.clone(), true, true, SVD_EPS, MAX_SWEEPS)?;
        Some(Self {
            u: svd.u?,
            singular_values: svd.singular_values,
            v_t: svd.v_t?,
        })
    }

    /// `U diag(sigma) Vᵀ` for a replacement spectrum of the same length.
    pub fn recompose(&self, sigma: &[f64]) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (j, &s) in sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * &self.v_t
    }
}

/// Singular values only, sorted non-increasing.
pub fn singular_values(a: &DMatrix<f64>) -> Option<DVector<f64>> {
    SVD::try_new(a.clone(), false, false, SVD_EPS, MAX_SWEEPS).map(|s| s.singular_values)
}

/// Eigen-decomposition of `(A + Aᵀ)/2` with eigenvalues sorted ascending.
///
/// Columns of the returned matrix are the matching unit eigenvectors.
pub fn symmetric_eigen_ascending(a: &DMatrix<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let sym = symmetrize(a);
    let eig = SymmetricEigen::try_new(sym, EIGEN_EPS, MAX_SWEEPS)?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Some((values, vectors))
}

/// Eigenvectors of the `k` smallest eigenvalues of the symmetric part of `a`,
/// together with those eigenvalues.
pub fn smallest_eigenvectors(a: &DMatrix<f64>, k: usize) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let (values, vectors) = symmetric_eigen_ascending(a)?;
    Some((values.rows(0, k).into_owned(), vectors.columns(0, k).into_owned()))
}

/// Eigenvectors of the `k` largest eigenvalues, largest first.
pub fn largest_eigenvectors(a: &DMatrix<f64>, k: usize) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let (values, vectors) = symmetric_eigen_ascending(a)?;
    let n = values.len();
    let vals = DVector::from_iterator(k, (0..k).map(|i| values[n - 1 - i]));
    let mut vecs = DMatrix::zeros(n, k);
    for i in 0..k {
        vecs.set_column(i, &vectors.column(n - 1 - i));
    }
    Some((vals, vecs))
}

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Orthonormal basis for the column space of `a` (modified Gram–Schmidt, run twice).
///
/// Columns that become numerically dependent are replaced by the next unit
/// vector not yet spanned, so the result always has `a.ncols()` orthonormal columns.
pub fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = a.shape();
    let mut q = a.clone();
    let mut fallback = 0usize;
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).into_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm > 1e-10 {
            q.column_mut(j).scale_mut(1.0 / norm);
            continue;
        }
        // dependent column: substitute a basis vector outside the current span
        loop {
            let mut e = DVector::zeros(n);
            e[fallback % n] = 1.0;
            fallback += 1;
            for i in 0..j {
                let proj = q.column(i).dot(&e);
                e.axpy(-proj, &q.column(i).into_owned(), 1.0);
            }
            let en = e.norm();
            if en > 1e-6 {
                q.set_column(j, &(e / en));
                break;
            }
        }
    }
    q
}

/// Random `n × k` matrix with orthonormal columns.
pub fn random_orthonormal<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    orthonormalize(&g)
}

/// Max-abs deviation of `QᵀQ` from the identity.
pub fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
    let g = q.transpose() * q;
    let k = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn all_finite(a: &DMatrix<f64>) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Squared Euclidean distances between the rows of `f`.
pub fn row_sq_distances(f: &DMatrix<f64>) -> DMatrix<f64> {
    let n = f.nrows();
    let norms: Vec<f64> = (0..n).map(|i| f.row(i).norm_squared()).collect();
    let gram = f * f.transpose();
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (norms[i] + norms[j] - 2.0 * gram[(i, j)]).max(0.0);
            t[(i, j)] = d;
            t[(j, i)] = d;
        }
    }
    t
}

/// Largest principal-angle sine between the column spaces of two orthonormal
/// bases, computed from the projector difference.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    singular_values(&(pa - pb)).map(|s| s.max()).unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthonormalize_handles_dependent_columns() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let q = orthonormalize(&a);
        assert!(orthonormality_error(&q) < 1e-12);
    }

    #[test]
    fn eigen_sorted_ascending() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 5.0]);
        let (vals, vecs) = symmetric_eigen_ascending(&a).unwrap();
        assert_eq!(vals.as_slice(), &[-1.0, 2.0, 5.0]);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_recompose_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(5, 4, |_, _| rng.sample::<f64, _>(StandardNormal));
        let svd = SortedSvd::compute(&a).unwrap();
        let s: Vec<f64> = svd.singular_values.iter().copied().collect();
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert!((svd.recompose(&s) - &a).norm() < 1e-10);
    }

    #[test]
    fn subspace_distance_zero_for_rotated_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_orthonormal(6, 2, &mut rng);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        assert!(subspace_distance(&q, &(&q * r)) < 1e-10);
    }
}
