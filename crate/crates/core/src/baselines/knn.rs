use serde::{Deserialize, Serialize};

use super::adapters::{column_concat, concat_channels};
use crate::data::{BinaryLabel, ChannelStandardizer, Dataset, MTSample};
use crate::error::{Error, Result};

/// K-nearest neighbours on standardized, concatenated channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub standardizer: ChannelStandardizer,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<BinaryLabel>,
}

impl KnnModel {
    pub fn fit(ds: &Dataset, k: usize) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::arg("k-nearest neighbours needs a nonempty training set"));
        }
        if k == 0 {
            return Err(Error::arg("k must be positive"));
        }
        column_concat(ds)?;
        let standardizer = ChannelStandardizer::fit(ds)?;
        let rows = ds
            .samples
            .iter()
            .map(|s| concat_channels(&standardizer.transform(s)))
            .collect();
        Ok(KnnModel {
            k,
            standardizer,
            rows,
            labels: ds.labels(),
        })
    }

    /// Indices of the `k` nearest rows; equal distances keep index order.
    pub fn neighbours(&self, query: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    /// Majority label of the neighbours; a split vote takes the nearest
    /// neighbour's label.
    pub fn predict(&self, sample: &MTSample) -> Result<BinaryLabel> {
        if sample.n_channels() != self.standardizer.n_channels() {
            return Err(Error::arg(format!("sample {} channel count differs from training", sample.id)));
        }
        let query = concat_channels(&self.standardizer.transform(sample));
        let nn = self.neighbours(&query);
        let pos = nn.iter().filter(|&&i| self.labels[i].is_positive()).count();
        let neg = nn.len() - pos;
        Ok(if pos == neg {
            self.labels[nn[0]]
        } else if pos > neg {
            BinaryLabel::Positive
        } else {
            BinaryLabel::Negative
        })
    }
}
