//! Clustering quality: accuracy under the best label matching, normalized
//! mutual information and purity.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricError {
    #[error("label vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("label vectors are empty")]
    Empty,
}

pub type Result<T> = std::result::Result<T, MetricError>;

/// The three scores of one clustering, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
}

impl MetricRecord {
    pub fn nan() -> Self {
        Self { acc: f64::NAN, nmi: f64::NAN, purity: f64::NAN }
    }
}

/// Scores `pred` against `truth`.
pub fn evaluate(pred: &[usize], truth: &[usize]) -> Result<MetricRecord> {
    Ok(MetricRecord { acc: accuracy(pred, truth)?, nmi: nmi(pred, truth)?, purity: purity(pred, truth)? })
}

/// Optimal one-to-one assignment of rows to columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `columns[i]` is the column assigned to row `i`.
    pub columns: Vec<usize>,
    pub cost: f64,
}

/// Minimum-cost perfect matching on a square cost matrix (Kuhn–Munkres with
/// potentials, `O(k³)`).
pub fn hungarian(cost: &DMatrix<f64>) -> Assignment {
    let k = cost.nrows();
    assert_eq!(k, cost.ncols(), "cost matrix must be square");
    if k == 0 {
        return Assignment { columns: Vec::new(), cost: 0.0 };
    }
    // 1-based arrays; index 0 is the virtual root
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut matched_row = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; k];
    for j in 1..=k {
        columns[matched_row[j] - 1] = j - 1;
    }
    let total = columns.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
    Assignment { columns, cost: total }
}

/// Maps arbitrary labels to `0..k` in order of first appearance.
fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = BTreeMap::new();
    let mapped = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect();
    (mapped, ids.len())
}

/// Contingency table (predicted × true) with sizes.
fn contingency(pred: &[usize], truth: &[usize]) -> Result<(DMatrix<f64>, usize, usize)> {
    if pred.len() != truth.len() {
        return Err(MetricError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(MetricError::Empty);
    }
    let (p, kp) = compact(pred);
    let (t, kt) = compact(truth);
    let mut table = DMatrix::zeros(kp, kt);
    for (&a, &b) in p.iter().zip(&t) {
        table[(a, b)] += 1.0;
    }
    Ok((table, kp, kt))
}

/// Fraction of samples correctly labelled under the best one-to-one mapping
/// of predicted clusters to classes.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let (table, kp, kt) = contingency(pred, truth)?;
    let k = kp.max(kt);
    let mut cost = DMatrix::zeros(k, k);
    for i in 0..kp {
        for j in 0..kt {
            cost[(i, j)] = -table[(i, j)];
        }
    }
    let matched = -hungarian(&cost).cost;
    Ok(matched / pred.len() as f64)
}

fn entropy(counts: impl Iterator<Item = f64>, n: f64) -> f64 {
    counts.filter(|&c| c > 0.0).map(|c| -(c / n) * (c / n).ln()).sum()
}

/// Mutual information normalized by `sqrt(H(pred)·H(truth))`, natural log.
///
/// When both partitions are a single cluster the score is 1; when only one is,
/// it is 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let (table, kp, kt) = contingency(pred, truth)?;
    let n = pred.len() as f64;
    let row_sums: Vec<f64> = table.row_iter().map(|r| r.sum()).collect();
    let col_sums: Vec<f64> = table.column_iter().map(|c| c.sum()).collect();
    let hp = entropy(row_sums.iter().copied(), n);
    let ht = entropy(col_sums.iter().copied(), n);
    if kp == 1 && kt == 1 {
        return Ok(1.0);
    }
    if hp == 0.0 || ht == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for i in 0..kp {
        for j in 0..kt {
            let nij = table[(i, j)];
            if nij > 0.0 {
                mi += (nij / n) * (n * nij / (row_sums[i] * col_sums[j])).ln();
            }
        }
    }
    Ok((mi / (hp * ht).sqrt()).clamp(0.0, 1.0))
}

/// Share of samples belonging to the majority class of their predicted cluster.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let (table, _, _) = contingency(pred, truth)?;
    let majority: f64 = table.row_iter().map(|r| r.max()).sum();
    Ok(majority / pred.len() as f64)
}
