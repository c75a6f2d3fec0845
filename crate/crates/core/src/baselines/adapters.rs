//! Adapting univariate classifiers to multivariate input, either by
//! concatenating channels end to end or by one classifier per channel with
//! a majority vote.

use serde::{Deserialize, Serialize};

use super::univariate::{UnivariateModel, UnivariateSpec};
use crate::data::{BinaryLabel, ChannelStandardizer, Dataset, MTSample};
use crate::error::{Error, Result};

/// Channel 0, then channel 1, ..., as one row.
pub fn concat_channels(channels: &[Vec<f64>]) -> Vec<f64> {
    channels.iter().flat_map(|row| row.iter().copied()).collect()
}

/// Inverse of [`concat_channels`] for `k` equal-length channels.
pub fn split_channels(row: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 || row.len() % k != 0 {
        return Err(Error::arg(format!("row of length {} does not split into {k} channels", row.len())));
    }
    Ok(row.chunks(row.len() / k).map(<[f64]>::to_vec).collect())
}

/// `(n, k, t)` to `(n, k * t)`.
pub fn column_concat(ds: &Dataset) -> Result<Vec<Vec<f64>>> {
    let Some(first) = ds.samples.first() else {
        return Ok(Vec::new());
    };
    let (k, t) = (first.n_channels(), first.len());
    for s in &ds.samples {
        if s.n_channels() != k || s.channels.iter().any(|row| row.len() != t) {
            return Err(Error::arg(format!("sample {} is ragged relative to {}", s.id, first.id)));
        }
    }
    Ok(ds.samples.iter().map(|s| concat_channels(&s.channels)).collect())
}

/// Majority label; an exact tie goes to the positive class.
pub fn majority_vote(votes: &[BinaryLabel]) -> BinaryLabel {
    let pos = votes.iter().filter(|v| v.is_positive()).count();
    if 2 * pos >= votes.len() {
        BinaryLabel::Positive
    } else {
        BinaryLabel::Negative
    }
}

/// One univariate classifier per channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleVote {
    pub members: Vec<UnivariateModel>,
    pub standardizer: ChannelStandardizer,
}

impl EnsembleVote {
    pub fn fit(ds: &Dataset, base: &UnivariateSpec) -> Result<Self> {
        let standardizer = ChannelStandardizer::fit(ds)?;
        let labels = ds.labels();
        let scaled: Vec<Vec<Vec<f64>>> = ds.samples.iter().map(|s| standardizer.transform(s)).collect();
        let members = (0..ds.n_channels())
            .map(|c| {
                let series: Vec<Vec<f64>> = scaled.iter().map(|s| s[c].clone()).collect();
                UnivariateModel::fit(base, series, labels.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EnsembleVote { members, standardizer })
    }

    pub fn votes(&self, sample: &MTSample) -> Result<Vec<BinaryLabel>> {
        if sample.n_channels() != self.members.len() {
            return Err(Error::arg(format!(
                "sample {} has {} channels, ensemble has {}",
                sample.id,
                sample.n_channels(),
                self.members.len()
            )));
        }
        let scaled = self.standardizer.transform(sample);
        Ok(self.members.iter().zip(&scaled).map(|(m, s)| m.predict(s)).collect())
    }

    pub fn predict(&self, sample: &MTSample) -> Result<BinaryLabel> {
        Ok(majority_vote(&self.votes(sample)?))
    }
}

/// A univariate classifier on standardized, concatenated channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcatModel {
    pub inner: UnivariateModel,
    pub standardizer: ChannelStandardizer,
}

impl ConcatModel {
    pub fn fit(ds: &Dataset, base: &UnivariateSpec) -> Result<Self> {
        column_concat(ds)?;
        let standardizer = ChannelStandardizer::fit(ds)?;
        let series = ds
            .samples
            .iter()
            .map(|s| concat_channels(&standardizer.transform(s)))
            .collect();
        let inner = UnivariateModel::fit(base, series, ds.labels())?;
        Ok(ConcatModel { inner, standardizer })
    }

    pub fn predict(&self, sample: &MTSample) -> Result<BinaryLabel> {
        if sample.n_channels() != self.standardizer.n_channels() {
            return Err(Error::arg(format!("sample {} channel count differs from training", sample.id)));
        }
        Ok(self.inner.predict(&concat_channels(&self.standardizer.transform(sample))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BinaryLabel::*;

    #[test]
    fn concat_order_and_inverse() {
        let ch = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(concat_channels(&ch), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(split_channels(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), ch);
        assert!(split_channels(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn single_channel_concat_is_the_series() {
        let s = MTSample {
            id: "a".into(),
            channels: vec![vec![5.0, 6.0, 7.0]],
            sample_rate: 20.0,
            onset_index: 0,
            concentrations: vec![1.0],
        };
        let ds = Dataset::new("d", vec!["A".into()], vec![s], "A").unwrap();
        assert_eq!(column_concat(&ds).unwrap(), vec![vec![5.0, 6.0, 7.0]]);
    }

    #[test]
    fn ragged_dataset_rejected() {
        let mk = |id: &str, t: usize| MTSample {
            id: id.into(),
            channels: vec![vec![0.0; t]; 2],
            sample_rate: 20.0,
            onset_index: 0,
            concentrations: vec![1.0],
        };
        let ds = Dataset::new("d", vec!["A".into()], vec![mk("a", 3), mk("b", 4)], "A").unwrap();
        assert!(column_concat(&ds).is_err());
    }

    #[test]
    fn votes() {
        assert_eq!(majority_vote(&[Positive, Positive, Negative]), Positive);
        assert_eq!(majority_vote(&[Negative, Negative, Positive]), Negative);
        assert_eq!(majority_vote(&[Positive, Negative]), Positive);
        assert_eq!(majority_vote(&[Negative; 4]), Negative);
    }
}
