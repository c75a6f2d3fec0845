//! Random-interval summary features fed to a single gini decision tree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{BinaryLabel, Dataset, MTSample};
use crate::error::{Error, Result};

pub const DEFAULT_INTERVALS: usize = 30;
pub const MAX_DEPTH: usize = 8;
pub const MIN_LEAF: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

/// `count` intervals of at least three steps (or the whole series when
/// shorter) inside `series_len`.
pub fn random_intervals(series_len: usize, count: usize, seed: u64) -> Vec<Interval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_len = series_len.min(3);
    (0..count)
        .map(|_| {
            let len = rng.random_range(min_len..=series_len);
            let start = rng.random_range(0..=series_len - len);
            Interval { start, len }
        })
        .collect()
}

/// Mean, standard deviation and least-squares slope of a window.
pub fn summarize(window: &[f64]) -> [f64; 3] {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let t_mean = (n - 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, v) in window.iter().enumerate() {
        let dt = i as f64 - t_mean;
        sxy += dt * (v - mean);
        sxx += dt * dt;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    [mean, var.sqrt(), slope]
}

pub fn interval_features(channels: &[Vec<f64>], intervals: &[Interval]) -> Result<Vec<f64>> {
    let t = channels.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(intervals.len() * channels.len() * 3);
    for iv in intervals {
        if iv.start + iv.len > t || iv.len == 0 {
            return Err(Error::arg(format!("interval {iv:?} outside series of length {t}")));
        }
        for row in channels {
            out.extend(summarize(&row[iv.start..iv.start + iv.len]));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        label: BinaryLabel,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> BinaryLabel {
        match self {
            TreeNode::Leaf { label } => *label,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

fn majority(labels: &[BinaryLabel], idx: &[usize]) -> BinaryLabel {
    let pos = idx.iter().filter(|&&i| labels[i].is_positive()).count();
    if 2 * pos >= idx.len() {
        BinaryLabel::Positive
    } else {
        BinaryLabel::Negative
    }
}

/// Best (feature, threshold, weighted child impurity) over every feature
/// and every midpoint between distinct sorted values, honouring the leaf
/// minimum. Returns `None` when no split lowers the impurity.
pub fn best_split(rows: &[Vec<f64>], labels: &[BinaryLabel], idx: &[usize], min_leaf: usize) -> Option<(usize, f64, f64)> {
    let n = idx.len();
    let total_pos = idx.iter().filter(|&&i| labels[i].is_positive()).count();
    let parent = gini(total_pos, n);
    let p = rows.first().map_or(0, Vec::len);
    let mut best: Option<(usize, f64, f64)> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for f in 0..p {
        order.sort_by(|&a, &b| rows[a][f].total_cmp(&rows[b][f]));
        let mut left_pos = 0usize;
        for split in 1..n {
            if labels[order[split - 1]].is_positive() {
                left_pos += 1;
            }
            let (lo, hi) = (rows[order[split - 1]][f], rows[order[split]][f]);
            if lo == hi || split < min_leaf || n - split < min_leaf {
                continue;
            }
            let impurity = (split as f64 * gini(left_pos, split)
                + (n - split) as f64 * gini(total_pos - left_pos, n - split))
                / n as f64;
            if impurity < parent - 1e-12 && best.is_none_or(|b| impurity < b.2) {
                best = Some((f, lo + (hi - lo) / 2.0, impurity));
            }
        }
    }
    best
}

fn grow(rows: &[Vec<f64>], labels: &[BinaryLabel], idx: &[usize], depth: usize, max_depth: usize, min_leaf: usize) -> TreeNode {
    let pos = idx.iter().filter(|&&i| labels[i].is_positive()).count();
    let pure = pos == 0 || pos == idx.len();
    if pure || depth >= max_depth || idx.len() < 2 * min_leaf {
        return TreeNode::Leaf {
            label: majority(labels, idx),
        };
    }
    match best_split(rows, labels, idx, min_leaf) {
        None => TreeNode::Leaf {
            label: majority(labels, idx),
        },
        Some((feature, threshold, _)) => {
            let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| rows[i][feature] <= threshold);
            TreeNode::Split {
                feature,
                threshold,
                left: Box::new(grow(rows, labels, &l, depth + 1, max_depth, min_leaf)),
                right: Box::new(grow(rows, labels, &r, depth + 1, max_depth, min_leaf)),
            }
        }
    }
}

/// Gini tree with bounded depth and leaf size. An empty or single-class
/// training set yields a constant leaf.
pub fn fit_tree(rows: &[Vec<f64>], labels: &[BinaryLabel], max_depth: usize, min_leaf: usize) -> TreeNode {
    let idx: Vec<usize> = (0..rows.len()).collect();
    if idx.is_empty() {
        return TreeNode::Leaf {
            label: BinaryLabel::Negative,
        };
    }
    grow(rows, labels, &idx, 0, max_depth, min_leaf.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalTree {
    pub intervals: Vec<Interval>,
    pub tree: TreeNode,
}

impl IntervalTree {
    pub fn fit(ds: &Dataset, n_intervals: usize, seed: u64) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::arg("interval tree needs training samples"));
        }
        let intervals = random_intervals(ds.min_len(), n_intervals, seed);
        let rows = ds
            .samples
            .iter()
            .map(|s| interval_features(&s.channels, &intervals))
            .collect::<Result<Vec<_>>>()?;
        let tree = fit_tree(&rows, &ds.labels(), MAX_DEPTH, MIN_LEAF);
        Ok(IntervalTree { intervals, tree })
    }

    pub fn predict(&self, sample: &MTSample) -> Result<BinaryLabel> {
        Ok(self.tree.predict(&interval_features(&sample.channels, &self.intervals)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BinaryLabel::*;

    #[test]
    fn summary_of_a_line() {
        let [mean, sd, slope] = summarize(&[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(mean, 4.0);
        assert!((sd - 5f64.sqrt()).abs() < 1e-12);
        assert!((slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_features_are_never_split() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![7.0, i as f64, 7.0]).collect();
        let labels: Vec<_> = (0..10).map(|i| if i < 5 { Negative } else { Positive }).collect();
        let idx: Vec<usize> = (0..10).collect();
        let (f, thr, imp) = best_split(&rows, &labels, &idx, 2).unwrap();
        assert_eq!((f, thr, imp), (1, 4.5, 0.0));
        let flat: Vec<Vec<f64>> = (0..10).map(|_| vec![7.0, 7.0]).collect();
        assert!(best_split(&flat, &labels, &idx, 2).is_none());
    }

    #[test]
    fn pure_training_set_is_constant() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let tree = fit_tree(&rows, &[Positive; 6], 8, 2);
        assert_eq!(tree, TreeNode::Leaf { label: Positive });
    }

    // Exhaustive search: the only feature with a zero-impurity split.
    #[test]
    fn separating_feature_becomes_a_stump() {
        let rows = vec![
            vec![0.3, 1.0, 9.0],
            vec![0.1, 2.0, 8.0],
            vec![0.4, 3.0, 1.0],
            vec![0.2, 4.0, 2.0],
            vec![0.5, 5.0, 3.0],
            vec![0.6, 6.0, 7.0],
        ];
        let labels = vec![Negative, Negative, Negative, Positive, Positive, Positive];
        let tree = fit_tree(&rows, &labels, 8, 2);
        match tree {
            TreeNode::Split {
                feature,
                threshold,
                ref left,
                ref right,
            } => {
                assert_eq!(feature, 1);
                assert_eq!(threshold, 3.5);
                assert_eq!(**left, TreeNode::Leaf { label: Negative });
                assert_eq!(**right, TreeNode::Leaf { label: Positive });
            }
            other => panic!("expected a stump, got {other:?}"),
        }
    }

    #[test]
    fn depth_is_bounded() {
        let rows: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let labels: Vec<_> = (0..64).map(|i| if (i / 2) % 2 == 0 { Negative } else { Positive }).collect();
        let tree = fit_tree(&rows, &labels, 3, 2);
        assert!(tree.depth() <= 3);
    }

    #[test]
    fn intervals_fit_short_series() {
        for len in [1, 2, 3, 10, 100] {
            for iv in random_intervals(len, 30, 1) {
                assert!(iv.start + iv.len <= len && iv.len >= len.min(3));
            }
        }
    }
}
