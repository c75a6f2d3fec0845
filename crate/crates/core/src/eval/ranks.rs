use std::collections::{BTreeMap, BTreeSet};

use super::benchmark::{BenchmarkRecord, RunStatus};
use crate::error::{Error, Result};

/// Ranks of `scores` (higher is better, rank 1 best); tied scores share the
/// mean of the positions they occupy.
pub fn rank_with_ties(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let mean = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = mean;
        }
        i = j;
    }
    ranks
}

/// Per-(dataset, split) rank of every ranked model.
pub type CellRanks = BTreeMap<(String, usize), BTreeMap<String, f64>>;

/// Ranks by F1 within each (dataset, split) cell. Models with any failed
/// record are left out entirely; every remaining model must cover every
/// cell.
pub fn cell_ranks(records: &[BenchmarkRecord]) -> Result<CellRanks> {
    let failed: BTreeSet<&str> = records
        .iter()
        .filter(|r| r.status == RunStatus::Failed)
        .map(|r| r.model.as_str())
        .collect();
    let kept: Vec<&BenchmarkRecord> = records.iter().filter(|r| !failed.contains(r.model.as_str())).collect();
    let models: BTreeSet<&str> = kept.iter().map(|r| r.model.as_str()).collect();
    let mut cells: BTreeMap<(String, usize), BTreeMap<&str, f64>> = BTreeMap::new();
    for r in &kept {
        let cell = cells.entry((r.dataset.clone(), r.split)).or_default();
        if cell.insert(r.model.as_str(), r.f1).is_some() {
            return Err(Error::arg(format!(
                "duplicate record for model {} on dataset {} split {}",
                r.model, r.dataset, r.split
            )));
        }
    }
    let mut out = CellRanks::new();
    for ((dataset, split), scores) in cells {
        if let Some(missing) = models.iter().find(|m| !scores.contains_key(*m)) {
            return Err(Error::arg(format!("model {missing} has no record for dataset {dataset} split {split}")));
        }
        let names: Vec<&str> = scores.keys().copied().collect();
        let values: Vec<f64> = scores.values().copied().collect();
        let ranks = rank_with_ties(&values);
        out.insert(
            (dataset, split),
            names.into_iter().map(String::from).zip(ranks).collect(),
        );
    }
    Ok(out)
}

/// Mean rank of every model over all cells.
pub fn average_ranks(records: &[BenchmarkRecord]) -> Result<BTreeMap<String, f64>> {
    let cells = cell_ranks(records)?;
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    for ranks in cells.values() {
        for (m, r) in ranks {
            *sums.entry(m.clone()).or_default() += r;
        }
    }
    let n = cells.len() as f64;
    Ok(sums.into_iter().map(|(m, s)| (m, s / n)).collect())
}
