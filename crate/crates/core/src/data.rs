//! Sample and dataset containers, prefix slicing, metrics and the dataset
//! file format.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling rate assumed when none is given: 5 s of exposure is 100 steps.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 20.0;

/// One exposure of a k-channel sensor array.
#[derive(Debug, Clone, PartialEq)]
pub struct MTSample {
    pub id: String,
    /// Channel-major resistances, `channels[c][t]`.
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: f64,
    /// First step at which analyte flux is present. A prefix cut at or before
    /// the onset carries `onset_index == len()`.
    pub onset_index: usize,
    pub concentrations: Vec<f64>,
}

impl MTSample {
    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column `t` across all channels.
    pub fn column(&self, t: usize) -> Vec<f64> {
        self.channels.iter().map(|row| row[t]).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.len();
        if self.channels.is_empty() || t == 0 {
            return Err(Error::arg(format!("sample {}: no channel data", self.id)));
        }
        if self.channels.iter().any(|row| row.len() != t) {
            return Err(Error::arg(format!("sample {}: ragged channel lengths", self.id)));
        }
        if self.onset_index > t {
            return Err(Error::Range(format!(
                "sample {}: onset {} beyond length {}",
                self.id, self.onset_index, t
            )));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(Error::arg(format!("sample {}: sample rate must be positive", self.id)));
        }
        if self.concentrations.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::arg(format!("sample {}: negative concentration", self.id)));
        }
        Ok(())
    }

    /// Indices of analytes with nonzero concentration.
    pub fn exposed_analytes(&self) -> Vec<usize> {
        self.concentrations
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// First `l` columns of every channel; metadata kept, onset clamped to `l`.
pub fn prefix(x: &MTSample, l: usize) -> Result<MTSample> {
    let t = x.len();
    if l < 1 || l > t {
        return Err(Error::Range(format!("prefix length {l} outside 1..={t}")));
    }
    Ok(MTSample {
        id: x.id.clone(),
        channels: x.channels.iter().map(|row| row[..l].to_vec()).collect(),
        sample_rate: x.sample_rate,
        onset_index: x.onset_index.min(l),
        concentrations: x.concentrations.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryLabel {
    Positive,
    Negative,
}

impl BinaryLabel {
    /// Positive iff the target analyte is present at a strictly positive
    /// concentration.
    pub fn from_concentrations(concentrations: &[f64], positive_index: usize) -> Self {
        if concentrations.get(positive_index).copied().unwrap_or(0.0) > 0.0 {
            BinaryLabel::Positive
        } else {
            BinaryLabel::Negative
        }
    }

    pub fn from_sign(score: f64) -> Self {
        if score > 0.0 {
            BinaryLabel::Positive
        } else {
            BinaryLabel::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == BinaryLabel::Positive
    }

    /// +1 / -1 encoding.
    pub fn signed(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn flip(self) -> Self {
        match self {
            BinaryLabel::Positive => BinaryLabel::Negative,
            BinaryLabel::Negative => BinaryLabel::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionResult {
    pub label: BinaryLabel,
    pub decision_distance: f64,
    pub prefix_len: usize,
    pub infer_seconds: f64,
}

/// Binary F1 over the positive class: `2TP / (2TP + FP + FN)`, 0 when the
/// denominator vanishes.
pub fn f1_score(preds: &[BinaryLabel], truth: &[BinaryLabel]) -> Result<f64> {
    if preds.len() != truth.len() {
        return Err(Error::arg(format!(
            "f1: {} predictions vs {} labels",
            preds.len(),
            truth.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::arg("f1: empty label lists"));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (p, t) in preds.iter().zip(truth) {
        match (p.is_positive(), t.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fp + fneg;
    Ok(if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    })
}

/// `round(s * rate)`, at least one step for any positive duration.
pub fn seconds_to_steps(seconds: f64, rate: f64) -> Result<usize> {
    if !(seconds >= 0.0) || !seconds.is_finite() {
        return Err(Error::arg(format!("duration must be a nonnegative number, got {seconds}")));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::arg(format!("sample rate must be positive, got {rate}")));
    }
    let steps = (seconds * rate).round() as usize;
    Ok(if seconds > 0.0 { steps.max(1) } else { 0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub analyte_names: Vec<String>,
    pub samples: Vec<MTSample>,
    pub positive_analyte: String,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        analyte_names: Vec<String>,
        samples: Vec<MTSample>,
        positive_analyte: impl Into<String>,
    ) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            analyte_names,
            samples,
            positive_analyte: positive_analyte.into(),
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        self.positive_index()?;
        let a = self.analyte_names.len();
        let mut seen = HashSet::new();
        for s in &self.samples {
            s.validate()?;
            if s.concentrations.len() != a {
                return Err(Error::arg(format!(
                    "sample {}: {} concentrations for {} analytes",
                    s.id,
                    s.concentrations.len(),
                    a
                )));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(Error::arg(format!("duplicate sample id {}", s.id)));
            }
        }
        if let Some(first) = self.samples.first() {
            for s in &self.samples[1..] {
                if s.n_channels() != first.n_channels() {
                    return Err(Error::arg(format!("sample {}: channel count differs", s.id)));
                }
                if s.sample_rate != first.sample_rate {
                    return Err(Error::arg(format!("sample {}: sample rate differs", s.id)));
                }
            }
        }
        Ok(())
    }

    pub fn positive_index(&self) -> Result<usize> {
        self.analyte_names
            .iter()
            .position(|n| *n == self.positive_analyte)
            .ok_or_else(|| Error::Lookup(self.positive_analyte.clone()))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_channels(&self) -> usize {
        self.samples.first().map_or(0, MTSample::n_channels)
    }

    pub fn sample_rate(&self) -> f64 {
        self.samples
            .first()
            .map_or(DEFAULT_SAMPLE_RATE_HZ, |s| s.sample_rate)
    }

    /// Shortest series length in the dataset.
    pub fn min_len(&self) -> usize {
        self.samples.iter().map(MTSample::len).min().unwrap_or(0)
    }

    pub fn label_of(&self, sample: &MTSample) -> BinaryLabel {
        let pos = self.positive_index().unwrap_or(usize::MAX);
        BinaryLabel::from_concentrations(&sample.concentrations, pos)
    }

    pub fn labels(&self) -> Vec<BinaryLabel> {
        self.samples.iter().map(|s| self.label_of(s)).collect()
    }

    fn with_samples(&self, samples: Vec<MTSample>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            analyte_names: self.analyte_names.clone(),
            samples,
            positive_analyte: self.positive_analyte.clone(),
        }
    }

    /// Samples whose id is in `ids`, in dataset order.
    pub fn subset(&self, ids: &[String]) -> Result<Dataset> {
        let wanted: HashSet<&str> = ids.iter().map(String::as_str).collect();
        let samples: Vec<MTSample> = self
            .samples
            .iter()
            .filter(|s| wanted.contains(s.id.as_str()))
            .cloned()
            .collect();
        if samples.len() != wanted.len() {
            return Err(Error::Lookup(format!("{} ids not found in {}", wanted.len() - samples.len(), self.name)));
        }
        Ok(self.with_samples(samples))
    }

    /// Every sample cut to its first `l` steps.
    pub fn prefixed(&self, l: usize) -> Result<Dataset> {
        let samples = self
            .samples
            .iter()
            .map(|s| prefix(s, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with_samples(samples))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = DatasetFile {
            name: self.name.clone(),
            sample_rate_hz: self.sample_rate(),
            analytes: self.analyte_names.clone(),
            positive_analyte: self.positive_analyte.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| SampleRecord {
                    id: s.id.clone(),
                    onset_index: s.onset_index,
                    concentrations: s.concentrations.clone(),
                    channels: s.channels.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Parse {
            what: "dataset".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DatasetFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "dataset".into(),
            message: e.to_string(),
        })?;
        let rate = file.sample_rate_hz;
        let samples = file
            .samples
            .into_iter()
            .map(|r| MTSample {
                id: r.id,
                channels: r.channels,
                sample_rate: rate,
                onset_index: r.onset_index,
                concentrations: r.concentrations,
            })
            .collect();
        let ds = Dataset::new(file.name, file.analytes, samples, file.positive_analyte)?;
        if let Some(s) = ds.samples.iter().find(|s| s.onset_index >= s.len()) {
            return Err(Error::Range(format!("sample {}: onset must precede the last step", s.id)));
        }
        Ok(ds)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    name: String,
    sample_rate_hz: f64,
    analytes: Vec<String>,
    positive_analyte: String,
    samples: Vec<SampleRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleRecord {
    id: String,
    onset_index: usize,
    concentrations: Vec<f64>,
    channels: Vec<Vec<f64>>,
}

/// Per-channel mean and standard deviation fit on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStandardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ChannelStandardizer {
    pub fn identity(k: usize) -> Self {
        ChannelStandardizer {
            mean: vec![0.0; k],
            std: vec![1.0; k],
        }
    }

    pub fn fit(ds: &Dataset) -> Result<Self> {
        let k = ds.n_channels();
        if ds.is_empty() || k == 0 {
            return Err(Error::arg("cannot fit a standardizer on an empty dataset"));
        }
        let mut mean = vec![0.0; k];
        let mut std = vec![0.0; k];
        for c in 0..k {
            let mut n = 0usize;
            let mut sum = 0.0;
            for s in &ds.samples {
                sum += s.channels[c].iter().sum::<f64>();
                n += s.len();
            }
            let mu = sum / n as f64;
            let mut ss = 0.0;
            for s in &ds.samples {
                ss += s.channels[c].iter().map(|v| (v - mu) * (v - mu)).sum::<f64>();
            }
            let sd = (ss / n as f64).sqrt();
            mean[c] = mu;
            std[c] = if sd > 1e-12 { sd } else { 1.0 };
        }
        Ok(ChannelStandardizer { mean, std })
    }

    pub fn n_channels(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_value(&self, c: usize, v: f64) -> f64 {
        (v - self.mean[c]) / self.std[c]
    }

    /// Standardized copy of the channel matrix.
    pub fn transform(&self, sample: &MTSample) -> Vec<Vec<f64>> {
        sample
            .channels
            .iter()
            .enumerate()
            .map(|(c, row)| row.iter().map(|v| self.apply_value(c, *v)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn sample(channels: Vec<Vec<f64>>) -> MTSample {
        MTSample {
            id: "s".into(),
            channels,
            sample_rate: 20.0,
            onset_index: 1,
            concentrations: vec![0.0, 17.0, 0.0, 0.0],
        }
    }

    #[test]
    fn prefix_slices_columns() {
        let x = sample(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let p = prefix(&x, 2).unwrap();
        assert_eq!(p.channels, vec![vec![1.0, 2.0], vec![4.0, 5.0]]);
        assert_eq!(p.onset_index, 1);
    }

    #[test]
    fn prefix_full_and_single() {
        let rows: Vec<Vec<f64>> = (0..8).map(|c| (0..100).map(|t| (c * 100 + t) as f64).collect()).collect();
        let x = sample(rows);
        assert_eq!(prefix(&x, 100).unwrap(), x);
        let one = prefix(&x, 1).unwrap();
        assert_eq!(one.n_channels(), 8);
        assert_eq!(one.column(0), x.column(0));
        assert_eq!(one.onset_index, 1);
    }

    #[test]
    fn prefix_out_of_range() {
        let x = sample(vec![vec![1.0, 2.0, 3.0]]);
        assert!(matches!(prefix(&x, 0), Err(Error::Range(_))));
        assert!(matches!(prefix(&x, 4), Err(Error::Range(_))));
    }

    #[test]
    fn f1_cases() {
        use BinaryLabel::*;
        assert_eq!(f1_score(&[Positive, Negative], &[Positive, Negative]).unwrap(), 1.0);
        assert_eq!(f1_score(&[Negative, Negative], &[Positive, Positive]).unwrap(), 0.0);
        // TP=1, FP=1, FN=1
        let preds = [Positive, Positive, Negative, Negative];
        let truth = [Positive, Negative, Positive, Negative];
        assert_eq!(f1_score(&preds, &truth).unwrap(), 0.5);
        assert_eq!(f1_score(&[Negative], &[Negative]).unwrap(), 0.0);
        assert!(f1_score(&[Negative], &[]).is_err());
        assert!(f1_score(&[], &[]).is_err());
    }

    #[test]
    fn steps_from_seconds() {
        assert_eq!(seconds_to_steps(5.0, 20.0).unwrap(), 100);
        assert_eq!(seconds_to_steps(0.25, 20.0).unwrap(), 5);
        assert_eq!(seconds_to_steps(0.0, 20.0).unwrap(), 0);
        assert_eq!(seconds_to_steps(0.001, 20.0).unwrap(), 1);
        assert!(seconds_to_steps(-1.0, 20.0).is_err());
        assert!(seconds_to_steps(1.0, 0.0).is_err());
    }

    #[test]
    fn binarization_is_strict() {
        assert_eq!(BinaryLabel::from_concentrations(&[17.0, 0.0], 0), BinaryLabel::Positive);
        assert_eq!(BinaryLabel::from_concentrations(&[0.0, 17.0], 0), BinaryLabel::Negative);
        assert_eq!(BinaryLabel::from_concentrations(&[0.0, 0.0], 0), BinaryLabel::Negative);
    }

    #[test]
    fn dataset_rejects_inconsistent_samples() {
        let a = sample(vec![vec![1.0, 2.0]]);
        let mut b = a.clone();
        b.id = "t".into();
        b.channels.push(vec![0.0, 0.0]);
        let names = vec!["A".into(), "B".into(), "C".into(), "D".into()];
        assert!(Dataset::new("x", names.clone(), vec![a.clone(), b], "A").is_err());
        assert!(Dataset::new("x", names.clone(), vec![a.clone()], "Z").is_err());
        let mut ragged = a.clone();
        ragged.channels = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(Dataset::new("x", names, vec![ragged], "A").is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut x = sample(vec![vec![0.1 + 0.2, 1.0 / 3.0, 1e-300], vec![f64::MAX, -2.5e17, 7.0]]);
        x.concentrations = vec![0.0, 17.123456789012345, 0.0, 0.0];
        let ds = Dataset::new("d", vec!["A".into(), "B".into(), "C".into(), "D".into()], vec![x], "A").unwrap();
        let back = Dataset::from_json(&ds.to_json().unwrap()).unwrap();
        assert_eq!(back, ds);
    }

    proptest! {
        #[test]
        fn nested_prefix_is_min_prefix(t in 1usize..40, a in 1usize..40, b in 1usize..40, seed in 0u64..1000) {
            let a = a.min(t);
            let b = b.min(t);
            let rows: Vec<Vec<f64>> = (0..3).map(|c| (0..t).map(|i| ((seed + (c * 31 + i) as u64) % 97) as f64).collect()).collect();
            let mut x = sample(rows);
            x.onset_index = (seed as usize) % t;
            let nested = prefix(&prefix(&x, a).unwrap(), b.min(a)).unwrap();
            prop_assert_eq!(nested, prefix(&x, a.min(b)).unwrap());
        }

        #[test]
        fn f1_permutation_invariant(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..50), rot in 0usize..50) {
            let to = |b: bool| if b { BinaryLabel::Positive } else { BinaryLabel::Negative };
            let preds: Vec<_> = bits.iter().map(|(p, _)| to(*p)).collect();
            let truth: Vec<_> = bits.iter().map(|(_, t)| to(*t)).collect();
            let mut pairs: Vec<_> = preds.iter().copied().zip(truth.iter().copied()).collect();
            let n = pairs.len();
            pairs.rotate_left(rot % n);
            pairs.reverse();
            let (p2, t2): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            prop_assert_eq!(f1_score(&preds, &truth).unwrap(), f1_score(&p2, &t2).unwrap());
        }

        #[test]
        fn dataset_json_round_trip(vals in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 6), conc in 0.0f64..100.0) {
            let x = MTSample {
                id: "p".into(),
                channels: vec![vals[..3].to_vec(), vals[3..].to_vec()],
                sample_rate: 20.0,
                onset_index: 1,
                concentrations: vec![conc, 0.0],
            };
            let ds = Dataset::new("d", vec!["A".into(), "B".into()], vec![x], "A").unwrap();
            let back = Dataset::from_json(&ds.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
