//! Shrinking-window elimination contest.
//!
//! Each round shortens the exposure window by a fixed step. Every model
//! still standing is refit on training data cut to the window and scored
//! on equally cut test data; a mean F1 over the splits below the floor
//! eliminates it. In the inference-biased variant the time a model needs to
//! classify a sample is taken out of the window budget before the data is
//! cut.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::benchmark::{csv_err, BenchmarkData};
use crate::data::{f1_score, seconds_to_steps, Dataset};
use crate::error::{Error, Result};
use crate::model::{Classifier, Learner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalMode {
    Plain,
    InferenceBiased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalConfig {
    pub start_s: f64,
    pub step_s: f64,
    pub floor: f64,
    pub mode: SurvivalMode,
}

impl Default for SurvivalConfig {
    fn default() -> Self {
        SurvivalConfig {
            start_s: 5.0,
            step_s: 0.25,
            floor: 0.8,
            mode: SurvivalMode::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEntry {
    pub model: String,
    /// Mean F1 over the splits; 0 when fitting failed.
    pub f1: f64,
    /// Mean per-sample decision latency charged against the window.
    pub latency_s: f64,
    pub eliminated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRound {
    pub window_seconds: f64,
    pub prefix_len: usize,
    pub entries: Vec<SurvivalEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalTable {
    pub mode: SurvivalMode,
    pub rounds: Vec<SurvivalRound>,
}

impl SurvivalTable {
    /// Window of the round in which `model` was eliminated.
    pub fn eliminated_at(&self, model: &str) -> Option<f64> {
        self.rounds
            .iter()
            .find(|r| r.entries.iter().any(|e| e.model == model && e.eliminated))
            .map(|r| r.window_seconds)
    }

    /// Shortest window `model` passed.
    pub fn survived_to(&self, model: &str) -> Option<f64> {
        self.rounds
            .iter()
            .filter(|r| r.entries.iter().any(|e| e.model == model && !e.eliminated))
            .map(|r| r.window_seconds)
            .reduce(f64::min)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["round", "window_seconds", "model", "f1", "eliminated"])
            .map_err(csv_err)?;
        for (i, r) in self.rounds.iter().enumerate() {
            for e in &r.entries {
                w.write_record([
                    i.to_string(),
                    format!("{:.2}", r.window_seconds),
                    e.model.clone(),
                    e.f1.to_string(),
                    e.eliminated.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| Error::io("survival", e))
    }
}

/// Per-sample latency of `model` on `test`. Streaming models are charged
/// for one step per sample, since earlier steps were processed while the
/// data arrived.
fn decision_latency(model: &dyn Classifier, test: &Dataset) -> Result<f64> {
    let start = Instant::now();
    for s in &test.samples {
        model.predict(s)?;
    }
    let per_sample = start.elapsed().as_secs_f64() / test.len().max(1) as f64;
    Ok(if model.is_streaming() {
        per_sample / test.min_len().max(1) as f64
    } else {
        per_sample
    })
}

fn score_at(learner: &dyn Learner, train: &Dataset, test: &Dataset, len: usize) -> Result<(f64, Box<dyn Classifier>)> {
    let train = train.prefixed(len)?;
    let test = test.prefixed(len)?;
    let model = learner.fit(&train)?;
    let preds = test
        .samples
        .iter()
        .map(|s| model.predict(s))
        .collect::<Result<Vec<_>>>()?;
    Ok((f1_score(&preds, &test.labels())?, model))
}

/// Score of one split at `window_s`; returns (f1, latency).
fn split_score(
    learner: &dyn Learner,
    train: &Dataset,
    test: &Dataset,
    window_s: f64,
    mode: SurvivalMode,
) -> Result<(f64, f64)> {
    let rate = train.sample_rate();
    let full = train.min_len().min(test.min_len());
    let len = seconds_to_steps(window_s, rate)?.min(full);
    if len == 0 {
        return Ok((0.0, 0.0));
    }
    let (f1, model) = score_at(learner, train, test, len)?;
    match mode {
        SurvivalMode::Plain => Ok((f1, 0.0)),
        SurvivalMode::InferenceBiased => {
            let latency = decision_latency(model.as_ref(), &test.prefixed(len)?)?;
            let usable = window_s - latency;
            if usable <= 0.0 {
                return Ok((0.0, latency));
            }
            let biased_len = seconds_to_steps(usable, rate)?.min(full);
            if biased_len == len {
                Ok((f1, latency))
            } else {
                Ok((score_at(learner, train, test, biased_len)?.0, latency))
            }
        }
    }
}

/// Runs rounds at `start - r * step` seconds until every model is out or
/// the window reaches zero.
pub fn survival(learners: &[&dyn Learner], data: &BenchmarkData, cfg: &SurvivalConfig) -> Result<SurvivalTable> {
    if !(cfg.start_s > 0.0) || !(cfg.step_s > 0.0) {
        return Err(Error::arg("start and step must be positive"));
    }
    if !(cfg.floor > 0.0 && cfg.floor <= 1.0) {
        return Err(Error::Range(format!("floor {} outside (0, 1]", cfg.floor)));
    }
    if data.splits.is_empty() {
        return Err(Error::arg("survival needs at least one split"));
    }
    let trains: Vec<Dataset> = data
        .splits
        .iter()
        .map(|s| data.train.subset(&s.train_ids))
        .collect::<Result<_>>()?;
    let mut alive: Vec<usize> = (0..learners.len()).collect();
    let mut rounds = Vec::new();
    for r in 0.. {
        let window = cfg.start_s - r as f64 * cfg.step_s;
        if window <= 1e-9 || alive.is_empty() {
            break;
        }
        let prefix_len = seconds_to_steps(window, data.train.sample_rate())?.min(data.train.min_len());
        let mut entries = Vec::with_capacity(alive.len());
        let mut next = Vec::with_capacity(alive.len());
        for &i in &alive {
            let learner = learners[i];
            let scores: Result<Vec<(f64, f64)>> = trains
                .iter()
                .map(|tr| split_score(learner, tr, &data.test, window, cfg.mode))
                .collect();
            let (f1, latency) = match scores {
                Ok(s) => {
                    let n = s.len() as f64;
                    (s.iter().map(|x| x.0).sum::<f64>() / n, s.iter().map(|x| x.1).sum::<f64>() / n)
                }
                Err(_) => (0.0, 0.0),
            };
            let eliminated = f1 < cfg.floor;
            if !eliminated {
                next.push(i);
            }
            entries.push(SurvivalEntry {
                model: learner.name(),
                f1,
                latency_s: latency,
                eliminated,
            });
        }
        rounds.push(SurvivalRound {
            window_seconds: window,
            prefix_len,
            entries,
        });
        alive = next;
    }
    Ok(SurvivalTable { mode: cfg.mode, rounds })
}
