//! One-nearest-neighbour classifiers over single series.

use serde::{Deserialize, Serialize};

use crate::data::BinaryLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distance", rename_all = "snake_case")]
pub enum UnivariateSpec {
    Euclidean,
    /// Dynamic time warping restricted to a Sakoe-Chiba band of
    /// `band * len` steps.
    Dtw { band: f64 },
}

impl Default for UnivariateSpec {
    fn default() -> Self {
        UnivariateSpec::Dtw { band: 0.1 }
    }
}

/// Squared Euclidean distance, abandoning once it exceeds `cutoff`.
pub fn euclidean_sq(a: &[f64], b: &[f64], cutoff: f64) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += (x - y) * (x - y);
        if acc > cutoff {
            return f64::INFINITY;
        }
    }
    acc
}

/// Banded DTW with squared pointwise cost. Returns infinity once every
/// cell of a row exceeds `cutoff`.
pub fn dtw_sq(a: &[f64], b: &[f64], band: usize, cutoff: f64) -> f64 {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return if n == m { 0.0 } else { f64::INFINITY };
    }
    let w = band.max(n.abs_diff(m));
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for i in 1..=n {
        cur.iter_mut().for_each(|v| *v = f64::INFINITY);
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(m);
        let mut row_min = f64::INFINITY;
        for j in lo..=hi {
            let cost = (a[i - 1] - b[j - 1]) * (a[i - 1] - b[j - 1]);
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = cost + best;
            row_min = row_min.min(cur[j]);
        }
        if row_min > cutoff {
            return f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariateModel {
    pub spec: UnivariateSpec,
    pub series: Vec<Vec<f64>>,
    pub labels: Vec<BinaryLabel>,
}

impl UnivariateModel {
    pub fn fit(spec: &UnivariateSpec, series: Vec<Vec<f64>>, labels: Vec<BinaryLabel>) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::arg("nearest-neighbour model needs training series"));
        }
        if series.len() != labels.len() {
            return Err(Error::arg("one label per training series required"));
        }
        Ok(UnivariateModel {
            spec: *spec,
            series,
            labels,
        })
    }

    fn distance(&self, a: &[f64], b: &[f64], cutoff: f64) -> f64 {
        match self.spec {
            UnivariateSpec::Euclidean => euclidean_sq(a, b, cutoff),
            UnivariateSpec::Dtw { band } => {
                let w = (band * a.len().max(b.len()) as f64).ceil() as usize;
                dtw_sq(a, b, w, cutoff)
            }
        }
    }

    /// Label of the nearest training series; the earliest wins ties.
    pub fn predict(&self, query: &[f64]) -> BinaryLabel {
        let mut best = (f64::INFINITY, 0usize);
        for (i, s) in self.series.iter().enumerate() {
            let d = self.distance(query, s, best.0);
            if d < best.0 {
                best = (d, i);
            }
        }
        self.labels[best.1]
    }
}
