use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

pub const DEFAULT_SPLITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub dataset: String,
    pub split_index: usize,
    pub train_ids: Vec<String>,
    pub withheld_ids: Vec<String>,
}

/// Seeded, label-stratified `n`-fold partition of the training corpus;
/// split `i` withholds fold `i` and trains on the rest.
///
/// Each class is shuffled and dealt round-robin into folds, continuing the
/// deal across classes so fold sizes differ by at most one.
pub fn make_splits(ds: &Dataset, n: usize, seed: u64) -> Result<Vec<SplitSpec>> {
    if n < 2 {
        return Err(Error::arg("at least two folds required"));
    }
    let labels = ds.labels();
    let mut pos: Vec<usize> = (0..ds.len()).filter(|&i| labels[i].is_positive()).collect();
    let mut neg: Vec<usize> = (0..ds.len()).filter(|&i| !labels[i].is_positive()).collect();
    if pos.len() < n || neg.len() < n {
        return Err(Error::arg(format!(
            "{}: need at least {n} samples per class, have {} positive / {} negative",
            ds.name,
            pos.len(),
            neg.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold_of = vec![0usize; ds.len()];
    for (deal, &i) in pos.iter().chain(&neg).enumerate() {
        fold_of[i] = deal % n;
    }
    Ok((0..n)
        .map(|f| {
            let (withheld, train): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| fold_of[i] == f);
            SplitSpec {
                dataset: ds.name.clone(),
                split_index: f,
                train_ids: train.iter().map(|&i| ds.samples[i].id.clone()).collect(),
                withheld_ids: withheld.iter().map(|&i| ds.samples[i].id.clone()).collect(),
            }
        })
        .collect())
}
