//! Closed-form ridge classifier with an internal holdout over the
//! regularization grid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{f1_score, BinaryLabel};
use crate::error::{Error, Result};

pub const LAMBDA_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// Solves `(X^T X + lambda I) w = X^T y`.
///
/// When there are more columns than rows the equivalent dual system
/// `(X X^T + lambda I) a = y`, `w = X^T a` is factored instead. Both are
/// symmetric positive definite for `lambda > 0` and use a Cholesky solve.
pub fn ridge_solve(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::arg("ridge lambda must be positive"));
    }
    if x.nrows() != y.len() {
        return Err(Error::arg("ridge: one target per row required"));
    }
    let (n, p) = x.shape();
    let not_spd = || Error::Degenerate("regularized gram matrix is not positive definite".into());
    if p <= n {
        let mut gram = x.tr_mul(x);
        for i in 0..p {
            gram[(i, i)] += lambda;
        }
        let chol = gram.cholesky().ok_or_else(not_spd)?;
        Ok(chol.solve(&x.tr_mul(y)))
    } else {
        let mut gram = x * x.transpose();
        for i in 0..n {
            gram[(i, i)] += lambda;
        }
        let chol = gram.cholesky().ok_or_else(not_spd)?;
        Ok(x.tr_mul(&chol.solve(y)))
    }
}

/// Per-feature centering and scaling fit on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStandardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl FeatureStandardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let p = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; p];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; p];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        FeatureStandardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Standardized features with a trailing constant column.
fn design(rows: &[Vec<f64>], std: &FeatureStandardizer) -> DMatrix<f64> {
    let p = std.mean.len() + 1;
    DMatrix::from_fn(rows.len(), p, |i, j| if j + 1 == p { 1.0 } else { (rows[i][j] - std.mean[j]) / std.scale[j] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    /// Weights over standardized features; the last entry multiplies the
    /// constant column.
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub standardizer: FeatureStandardizer,
}

impl RidgeModel {
    /// Picks lambda from `lambdas` by F1 on a fixed holdout (every fifth
    /// row), then refits on all rows. Ties go to the earlier grid entry.
    pub fn fit(rows: &[Vec<f64>], labels: &[BinaryLabel], lambdas: &[f64]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::arg("ridge: one label per row required"));
        }
        if rows.len() < 2 {
            return Err(Error::arg("ridge needs at least two rows"));
        }
        let n_pos = labels.iter().filter(|l| l.is_positive()).count();
        if n_pos == 0 || n_pos == labels.len() {
            return Err(Error::Degenerate("ridge needs both classes".into()));
        }
        if lambdas.is_empty() {
            return Err(Error::arg("empty lambda grid"));
        }
        let p = rows[0].len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::arg("ridge rows differ in length"));
        }

        let lambda = if lambdas.len() == 1 {
            lambdas[0]
        } else {
            let (fit_idx, hold_idx): (Vec<usize>, Vec<usize>) = (0..rows.len()).partition(|i| i % 5 != 4);
            let fit_rows: Vec<Vec<f64>> = fit_idx.iter().map(|&i| rows[i].clone()).collect();
            let fit_labels: Vec<BinaryLabel> = fit_idx.iter().map(|&i| labels[i]).collect();
            let hold_rows: Vec<Vec<f64>> = hold_idx.iter().map(|&i| rows[i].clone()).collect();
            let hold_labels: Vec<BinaryLabel> = hold_idx.iter().map(|&i| labels[i]).collect();
            let mut best = (lambdas[0], f64::NEG_INFINITY);
            if !hold_rows.is_empty() {
                for &lam in lambdas {
                    let m = Self::fit_single(&fit_rows, &fit_labels, lam)?;
                    let f1 = f1_score(&m.predict_rows(&hold_rows), &hold_labels)?;
                    if f1 > best.1 {
                        best = (lam, f1);
                    }
                }
            }
            best.0
        };
        Self::fit_single(rows, labels, lambda)
    }

    pub fn fit_single(rows: &[Vec<f64>], labels: &[BinaryLabel], lambda: f64) -> Result<Self> {
        let standardizer = FeatureStandardizer::fit(rows);
        let x = design(rows, &standardizer);
        let y = DVector::from_iterator(labels.len(), labels.iter().map(|l| l.signed()));
        let w = ridge_solve(&x, &y, lambda)?;
        Ok(RidgeModel {
            weights: w.iter().copied().collect(),
            lambda,
            standardizer,
        })
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        let z = self.standardizer.apply(row);
        let bias = *self.weights.last().unwrap_or(&0.0);
        z.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + bias
    }

    pub fn predict(&self, row: &[f64]) -> BinaryLabel {
        BinaryLabel::from_sign(self.score(row))
    }

    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Vec<BinaryLabel> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}
