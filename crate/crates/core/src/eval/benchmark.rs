use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::splits::SplitSpec;
use crate::data::{f1_score, BinaryLabel, Dataset};
use crate::error::{Error, Result};
use crate::model::Learner;

/// One benchmark corpus: the training set, its splits and the holdout.
#[derive(Debug, Clone)]
pub struct BenchmarkData {
    pub name: String,
    pub train: Dataset,
    pub test: Dataset,
    pub splits: Vec<SplitSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub model: String,
    pub dataset: String,
    pub split: usize,
    pub f1: f64,
    pub train_seconds: f64,
    /// Wall-clock seconds to classify the whole test set.
    pub infer_seconds: f64,
    pub status: RunStatus,
}

/// Score and timings of one fitted split.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub f1: f64,
    pub train_seconds: f64,
    pub infer_seconds: f64,
    pub predictions: Vec<BinaryLabel>,
}

/// Fits `learner` on `train` and classifies every sample of `test`.
pub fn evaluate(learner: &dyn Learner, train: &Dataset, test: &Dataset) -> Result<CellOutcome> {
    let start = Instant::now();
    let model = learner.fit(train)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let predictions = test
        .samples
        .iter()
        .map(|s| model.predict(s))
        .collect::<Result<Vec<_>>>()?;
    let infer_seconds = start.elapsed().as_secs_f64();
    let f1 = f1_score(&predictions, &test.labels())?;
    Ok(CellOutcome {
        f1,
        train_seconds,
        infer_seconds,
        predictions,
    })
}

fn run_cell(learner: &dyn Learner, data: &BenchmarkData, split: &SplitSpec) -> BenchmarkRecord {
    let outcome = data
        .train
        .subset(&split.train_ids)
        .and_then(|train| evaluate(learner, &train, &data.test));
    let (f1, train_seconds, infer_seconds, status) = match outcome {
        Ok(o) => (o.f1, o.train_seconds, o.infer_seconds, RunStatus::Ok),
        Err(_) => (0.0, 0.0, 0.0, RunStatus::Failed),
    };
    BenchmarkRecord {
        model: learner.name(),
        dataset: data.name.clone(),
        split: split.split_index,
        f1,
        train_seconds,
        infer_seconds,
        status,
    }
}

/// Every (model, dataset, split) cell, ordered by dataset, then model, then
/// split. With `jobs > 1` scores are computed concurrently and timings are
/// then re-measured in a serial pass so no two fits compete for the CPU.
pub fn run_benchmark(learners: &[&dyn Learner], data: &[BenchmarkData], jobs: usize) -> Result<Vec<BenchmarkRecord>> {
    let cells: Vec<(&BenchmarkData, &dyn Learner, &SplitSpec)> = data
        .iter()
        .flat_map(|d| {
            learners
                .iter()
                .flat_map(move |l| d.splits.iter().map(move |s| (d, *l, s)))
        })
        .collect();
    if jobs <= 1 {
        return Ok(cells.iter().map(|(d, l, s)| run_cell(*l, d, s)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::arg(e.to_string()))?;
    let mut records: Vec<BenchmarkRecord> = pool.install(|| cells.par_iter().map(|(d, l, s)| run_cell(*l, d, s)).collect());
    for ((d, l, s), rec) in cells.iter().zip(records.iter_mut()) {
        if rec.status == RunStatus::Ok {
            let timed = run_cell(*l, d, s);
            rec.train_seconds = timed.train_seconds;
            rec.infer_seconds = timed.infer_seconds;
        }
    }
    Ok(records)
}

pub fn write_records<W: Write>(records: &[BenchmarkRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("results", e))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchmarkRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let expected = ["model", "dataset", "split", "f1", "train_seconds", "infer_seconds", "status"];
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse {
            what: "results file".into(),
            message: format!("header must be `{}`", expected.join(",")),
        });
    }
    r.deserialize().map(|rec| rec.map_err(csv_err)).collect()
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Parse {
        what: "csv".into(),
        message: e.to_string(),
    }
}
