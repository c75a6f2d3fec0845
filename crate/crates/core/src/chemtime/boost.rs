//! Linear hinge-loss classifier on final embeddings.

use serde::{Deserialize, Serialize};

use crate::data::BinaryLabel;
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 1e-3;
pub const DEFAULT_ITERATIONS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMargin {
    pub w: Vec<f64>,
    pub b0: f64,
}

impl LinearMargin {
    pub fn score(&self, e: &[f64]) -> f64 {
        self.w.iter().zip(e).map(|(a, b)| a * b).sum::<f64>() + self.b0
    }

    /// Signed distance to the separating hyperplane.
    pub fn distance(&self, e: &[f64]) -> f64 {
        let norm = self.w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = self.score(e);
        if norm > 0.0 {
            s / norm
        } else {
            s
        }
    }

    pub fn predict(&self, e: &[f64]) -> BinaryLabel {
        BinaryLabel::from_sign(self.distance(e))
    }

    /// Full-batch Pegasos on the L2-regularized hinge objective
    /// `lambda/2 |(w, b)|^2 + mean_i max(0, 1 - y_i (w.x_i + b))`.
    ///
    /// The bias is an extra weight on a constant feature. Steps are
    /// `1 / (lambda t)` with projection onto the ball of radius
    /// `1/sqrt(lambda)`; the returned solution is the average of the
    /// second half of the iterates. Everything is deterministic.
    pub fn fit(features: &[Vec<f64>], labels: &[BinaryLabel], lambda: f64, iterations: usize) -> Result<Self> {
        if features.len() != labels.len() || features.is_empty() {
            return Err(Error::arg("margin fit needs one label per feature row"));
        }
        if !(lambda > 0.0) {
            return Err(Error::arg("lambda must be positive"));
        }
        let n_pos = labels.iter().filter(|l| l.is_positive()).count();
        if n_pos == 0 || n_pos == labels.len() {
            return Err(Error::Degenerate("training labels contain a single class".into()));
        }
        let d = features[0].len();
        if features.iter().any(|f| f.len() != d) {
            return Err(Error::arg("feature rows differ in length"));
        }
        let n = features.len() as f64;
        let radius = 1.0 / lambda.sqrt();
        let mut w = vec![0.0; d + 1];
        let mut avg = vec![0.0; d + 1];
        let burn_in = iterations / 2;
        let mut averaged = 0usize;
        for t in 1..=iterations {
            let eta = 1.0 / (lambda * t as f64);
            let mut step = vec![0.0; d + 1];
            for (x, l) in features.iter().zip(labels) {
                let y = l.signed();
                let margin = y * (x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[d]);
                if margin < 1.0 {
                    for (s, xi) in step.iter_mut().zip(x) {
                        *s += y * xi;
                    }
                    step[d] += y;
                }
            }
            let shrink = 1.0 - eta * lambda;
            for (wi, si) in w.iter_mut().zip(&step) {
                *wi = shrink * *wi + eta * si / n;
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                w.iter_mut().for_each(|v| *v *= radius / norm);
            }
            if t > burn_in {
                for (a, wi) in avg.iter_mut().zip(&w) {
                    *a += wi;
                }
                averaged += 1;
            }
        }
        avg.iter_mut().for_each(|v| *v /= averaged.max(1) as f64);
        if avg.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("margin weights are not finite".into()));
        }
        let b0 = avg[d];
        avg.truncate(d);
        Ok(LinearMargin { w: avg, b0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::f1_score;

    fn separable() -> (Vec<Vec<f64>>, Vec<BinaryLabel>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..20 {
            let a = i as f64 * 0.3;
            xs.push(vec![1.0 + 0.1 * a.cos(), 0.2 * a.sin()]);
            ys.push(BinaryLabel::Positive);
            xs.push(vec![-0.2 + 0.1 * a.cos(), 0.9 * a.sin()]);
            ys.push(BinaryLabel::Negative);
        }
        (xs, ys)
    }

    #[test]
    fn separable_data_is_fit_exactly() {
        let (xs, ys) = separable();
        let m = LinearMargin::fit(&xs, &ys, DEFAULT_LAMBDA, DEFAULT_ITERATIONS).unwrap();
        let preds: Vec<_> = xs.iter().map(|x| m.predict(x)).collect();
        assert_eq!(f1_score(&preds, &ys).unwrap(), 1.0);
    }

    #[test]
    fn flipped_labels_flip_every_distance() {
        let (xs, ys) = separable();
        let m = LinearMargin::fit(&xs, &ys, DEFAULT_LAMBDA, 500).unwrap();
        let flipped: Vec<_> = ys.iter().map(|l| l.flip()).collect();
        let mf = LinearMargin::fit(&xs, &flipped, DEFAULT_LAMBDA, 500).unwrap();
        for x in &xs {
            assert_eq!(m.distance(x), -mf.distance(x));
        }
    }

    #[test]
    fn single_class_is_degenerate() {
        let xs = vec![vec![1.0], vec![2.0]];
        let ys = vec![BinaryLabel::Positive; 2];
        assert!(matches!(LinearMargin::fit(&xs, &ys, 1e-3, 10), Err(Error::Degenerate(_))));
    }

    #[test]
    fn distance_sign_matches_label() {
        let m = LinearMargin { w: vec![2.0, 0.0], b0: -1.0 };
        assert_eq!(m.distance(&[1.0, 5.0]), 0.5);
        assert_eq!(m.predict(&[1.0, 5.0]), BinaryLabel::Positive);
        assert_eq!(m.predict(&[0.5, 5.0]), BinaryLabel::Negative);
    }
}
