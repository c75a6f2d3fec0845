use std::collections::BTreeMap;

use crate::chemtime::ChemTimeModel;
use crate::data::{prefix, BinaryLabel, Dataset, MTSample};
use crate::error::{Error, Result};
use crate::model::Classifier;

/// A classifier that can decide from the first `len` steps of a sample.
pub trait PrefixClassifier {
    fn predict_prefix(&self, sample: &MTSample, len: usize) -> Result<BinaryLabel>;
}

impl PrefixClassifier for ChemTimeModel {
    fn predict_prefix(&self, sample: &MTSample, len: usize) -> Result<BinaryLabel> {
        Ok(self.predict(sample, len)?.label)
    }
}

/// Applies a full-length classifier to the truncated sample.
pub struct Truncating<'a>(pub &'a dyn Classifier);

impl PrefixClassifier for Truncating<'_> {
    fn predict_prefix(&self, sample: &MTSample, len: usize) -> Result<BinaryLabel> {
        self.0.predict(&prefix(sample, len)?)
    }
}

/// Instances each trained for one window length; a prefix is classified by
/// the instance trained at exactly that length.
#[derive(Default)]
pub struct WindowedModels {
    pub by_len: BTreeMap<usize, Box<dyn Classifier>>,
}

impl PrefixClassifier for WindowedModels {
    fn predict_prefix(&self, sample: &MTSample, len: usize) -> Result<BinaryLabel> {
        let model = self
            .by_len
            .get(&len)
            .ok_or_else(|| Error::Capability(format!("no instance trained for prefix length {len}")))?;
        model.predict(&prefix(sample, len)?)
    }
}

/// True iff every test sample gets the same label at `l0` as at every
/// longer prefix.
pub fn serial_prefix(model: &dyn PrefixClassifier, test: &Dataset, l0: usize) -> Result<bool> {
    for s in &test.samples {
        if l0 < 1 || l0 > s.len() {
            return Err(Error::Range(format!("prefix {l0} outside 1..={}", s.len())));
        }
        let at = model.predict_prefix(s, l0)?;
        for l in l0 + 1..=s.len() {
            if model.predict_prefix(s, l)? != at {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest `l0` at which the model is serial on `test`. The full length is
/// always serial.
pub fn minimal_serial_prefix(model: &dyn PrefixClassifier, test: &Dataset) -> Result<usize> {
    let t = test.min_len();
    if t == 0 {
        return Err(Error::arg("empty test set"));
    }
    // labels[s][l - 1]
    let labels: Vec<Vec<BinaryLabel>> = test
        .samples
        .iter()
        .map(|s| (1..=t).map(|l| model.predict_prefix(s, l)).collect())
        .collect::<Result<_>>()?;
    let mut l0 = t;
    while l0 > 1 && labels.iter().all(|row| row[l0 - 2] == row[t - 1]) {
        l0 -= 1;
    }
    Ok(l0)
}
