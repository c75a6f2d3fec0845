//! Recurrent moving-target embedding classifier.
//!
//! A gated recurrent encoder reads the standardized resistance columns one
//! step at a time and projects its state into a fixed latent space of
//! analyte representations. Training pulls each step's embedding towards a
//! target that is the carrier-gas vector before flux onset and the exposure
//! analyte's vector afterwards. A linear margin classifier on the final
//! embedding turns the trajectory into a decision with a signed distance.

pub mod boost;
pub mod embedding;
pub mod encoder;
pub mod loss;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use boost::LinearMargin;
pub use embedding::{build_target_sequence, EmbeddingTable, TargetSequence, NONE_KEY};
pub use encoder::EncoderParams;
pub use loss::{sequence_loss, step_loss_grad, LossKind};

use crate::data::{f1_score, BinaryLabel, ChannelStandardizer, Dataset, MTSample, PredictionResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyperParams {
    pub hidden: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub loss_kind: LossKind,
    pub seed: u64,
    /// Global gradient-norm clip.
    pub clip: f64,
    /// Weight of each pre-onset step in the training objective.
    pub pre_onset_weight: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            hidden: 32,
            lr: 1e-2,
            epochs: 50,
            batch: 8,
            loss_kind: LossKind::Squared,
            seed: 0,
            clip: 5.0,
            pre_onset_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Boost {
    Margin(LinearMargin),
    NearestTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChemTimeModel {
    pub encoder: EncoderParams,
    pub loss_kind: LossKind,
    pub standardizer: ChannelStandardizer,
    pub table: EmbeddingTable,
    pub analyte_names: Vec<String>,
    pub positive_analyte: String,
    pub boost: Option<Boost>,
    /// Mean per-sample objective of each training epoch.
    pub training_loss: Vec<f64>,
}

/// Embeddings at every step, with boost distances when a boost is fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Vec<f64>>,
    pub distances: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Standardized input columns, `out[t][c]`.
fn input_columns(standardizer: &ChannelStandardizer, sample: &MTSample) -> Vec<Vec<f64>> {
    (0..sample.len())
        .map(|t| {
            sample
                .channels
                .iter()
                .enumerate()
                .map(|(c, row)| standardizer.apply_value(c, row[t]))
                .collect()
        })
        .collect()
}

/// Weighted summed loss of one sequence and the BPTT gradient of every
/// encoder parameter. `step_weights` of `None` weights every step by 1.
pub fn loss_and_grad(
    params: &EncoderParams,
    inputs: &[Vec<f64>],
    targets: &TargetSequence,
    kind: LossKind,
    table: &EmbeddingTable,
    step_weights: Option<&[f64]>,
) -> (f64, EncoderParams) {
    let caches = params.forward_cached(inputs);
    let mut total = 0.0;
    let mut de = Vec::with_capacity(caches.len());
    for (t, c) in caches.iter().enumerate() {
        let w = step_weights.map_or(1.0, |ws| ws[t]);
        let (l, mut g) = step_loss_grad(kind, &c.e, &targets.targets[t], targets.labels[t], table);
        total += w * l;
        if w != 1.0 {
            g.iter_mut().for_each(|v| *v *= w);
        }
        de.push(g);
    }
    let mut grad = params.zeros_like();
    params.backward(&caches, &de, &mut grad);
    (total, grad)
}

/// Fits the encoder by mini-batch gradient descent with backpropagation
/// through time. No boost is attached; see [`fit_boost`].
pub fn train(dataset: &Dataset, table: &EmbeddingTable, hp: &HyperParams) -> Result<ChemTimeModel> {
    if dataset.is_empty() {
        return Err(Error::arg("cannot train on an empty dataset"));
    }
    if hp.hidden == 0 || hp.batch == 0 {
        return Err(Error::arg("hidden size and batch size must be positive"));
    }
    table.validate()?;
    let k = dataset.n_channels();
    let standardizer = ChannelStandardizer::fit(dataset)?;
    let mut prepared = Vec::with_capacity(dataset.len());
    for s in &dataset.samples {
        let targets = build_target_sequence(s, table, &dataset.analyte_names)?;
        let weights: Vec<f64> = (0..s.len())
            .map(|t| if t < targets.onset { hp.pre_onset_weight } else { 1.0 })
            .collect();
        prepared.push((input_columns(&standardizer, s), targets, weights));
    }

    let mut params = EncoderParams::init(k, hp.hidden, table.dim, hp.seed);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    rng.set_stream(1);
    let mut history = Vec::with_capacity(hp.epochs);
    for epoch in 0..hp.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(hp.batch) {
            let mut grad = params.zeros_like();
            for &i in batch {
                let (inputs, targets, weights) = &prepared[i];
                let (l, g) = loss_and_grad(&params, inputs, targets, hp.loss_kind, table, Some(weights));
                epoch_loss += l;
                grad.add_scaled(&g, 1.0);
            }
            grad.scale(1.0 / batch.len() as f64);
            let norm = grad.norm();
            if !norm.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            if norm > hp.clip {
                grad.scale(hp.clip / norm);
            }
            params.add_scaled(&grad, -hp.lr);
        }
        let mean = epoch_loss / prepared.len() as f64;
        if !mean.is_finite() || !params.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        history.push(mean);
    }

    Ok(ChemTimeModel {
        encoder: params,
        loss_kind: hp.loss_kind,
        standardizer,
        table: table.clone(),
        analyte_names: dataset.analyte_names.clone(),
        positive_analyte: dataset.positive_analyte.clone(),
        boost: None,
        training_loss: history,
    })
}

/// Fits the linear margin on every training sample's final embedding,
/// positive analyte against all others.
pub fn fit_boost(model: &ChemTimeModel, train: &Dataset) -> Result<LinearMargin> {
    let feats: Vec<Vec<f64>> = train
        .samples
        .iter()
        .map(|s| model.final_embedding(s))
        .collect::<Result<_>>()?;
    LinearMargin::fit(&feats, &train.labels(), boost::DEFAULT_LAMBDA, boost::DEFAULT_ITERATIONS)
}

impl ChemTimeModel {
    pub fn with_boost(mut self, boost: Boost) -> Self {
        self.boost = Some(boost);
        self
    }

    pub fn n_channels(&self) -> usize {
        self.encoder.input
    }

    fn check(&self, sample: &MTSample) -> Result<()> {
        if sample.n_channels() != self.encoder.input {
            return Err(Error::arg(format!(
                "sample {} has {} channels, model expects {}",
                sample.id,
                sample.n_channels(),
                self.encoder.input
            )));
        }
        if sample.is_empty() {
            return Err(Error::arg(format!("sample {} is empty", sample.id)));
        }
        Ok(())
    }

    /// Advances the recurrence by one raw (unstandardized) column.
    pub fn step(&self, h_prev: &[f64], column: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = column
            .iter()
            .enumerate()
            .map(|(c, v)| self.standardizer.apply_value(c, *v))
            .collect();
        self.encoder.step(h_prev, &x)
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.encoder.initial_state()
    }

    /// Embedding after the last step of `sample`.
    pub fn final_embedding(&self, sample: &MTSample) -> Result<Vec<f64>> {
        self.embedding_at(sample, sample.len())
    }

    /// Embedding after the first `len` steps.
    pub fn embedding_at(&self, sample: &MTSample, len: usize) -> Result<Vec<f64>> {
        self.check(sample)?;
        if len < 1 || len > sample.len() {
            return Err(Error::Range(format!("prefix length {len} outside 1..={}", sample.len())));
        }
        let mut h = self.initial_state();
        let mut e = Vec::new();
        for t in 0..len {
            let (hn, en) = self.step(&h, &sample.column(t));
            h = hn;
            e = en;
        }
        Ok(e)
    }

    pub fn forward(&self, sample: &MTSample) -> Result<Trajectory> {
        self.check(sample)?;
        let inputs = input_columns(&self.standardizer, sample);
        let points: Vec<Vec<f64>> = self.encoder.forward_cached(&inputs).into_iter().map(|c| c.e).collect();
        let distances = self
            .boost
            .as_ref()
            .map(|b| points.iter().map(|e| self.boost_distance(b, e)).collect::<Vec<_>>());
        Ok(Trajectory { points, distances })
    }

    fn boost_distance(&self, boost: &Boost, e: &[f64]) -> f64 {
        match boost {
            Boost::Margin(m) => m.distance(e),
            Boost::NearestTarget => {
                let pos = self
                    .table
                    .get(&self.positive_analyte)
                    .map(|v| embedding::sq_dist(e, v).sqrt())
                    .unwrap_or(f64::INFINITY);
                let other = self
                    .table
                    .entries
                    .iter()
                    .filter(|(k, _)| **k != self.positive_analyte)
                    .map(|(_, v)| embedding::sq_dist(e, v).sqrt())
                    .fold(f64::INFINITY, f64::min);
                other - pos
            }
        }
    }

    /// Signed decision distance of an embedding; positive means the target
    /// analyte.
    pub fn decision_distance(&self, e: &[f64]) -> Result<f64> {
        let boost = self
            .boost
            .as_ref()
            .ok_or_else(|| Error::Capability("no boost classifier fit on this model".into()))?;
        Ok(self.boost_distance(boost, e))
    }

    /// Classifies the first `prefix_len` steps of `sample`.
    pub fn predict(&self, sample: &MTSample, prefix_len: usize) -> Result<PredictionResult> {
        let start = Instant::now();
        let e = self.embedding_at(sample, prefix_len)?;
        let d = self.decision_distance(&e)?;
        let infer_seconds = start.elapsed().as_secs_f64();
        Ok(PredictionResult {
            label: BinaryLabel::from_sign(d),
            decision_distance: d,
            prefix_len,
            infer_seconds,
        })
    }

    /// Decision distance after every step, from one streaming pass.
    pub fn decision_path(&self, sample: &MTSample) -> Result<Vec<f64>> {
        self.check(sample)?;
        let boost = self
            .boost
            .as_ref()
            .ok_or_else(|| Error::Capability("no boost classifier fit on this model".into()))?;
        let mut h = self.initial_state();
        let mut out = Vec::with_capacity(sample.len());
        for t in 0..sample.len() {
            let (hn, e) = self.step(&h, &sample.column(t));
            out.push(self.boost_distance(boost, &e));
            h = hn;
        }
        Ok(out)
    }
}

/// Smallest prefix length from which validation F1 stays at or above
/// `f1_floor` for every longer prefix. Falls back to the full length.
pub fn calibrate_early_window(model: &ChemTimeModel, validation: &Dataset, f1_floor: f64) -> Result<usize> {
    if validation.is_empty() {
        return Err(Error::arg("empty validation set"));
    }
    if !(f1_floor > 0.0 && f1_floor <= 1.0) {
        return Err(Error::Range(format!("f1 floor {f1_floor} outside (0, 1]")));
    }
    let t = validation.samples[0].len();
    if validation.samples.iter().any(|s| s.len() != t) {
        return Err(Error::arg("validation samples differ in length"));
    }
    let truth = validation.labels();
    let paths: Vec<Vec<f64>> = validation
        .samples
        .iter()
        .map(|s| model.decision_path(s))
        .collect::<Result<_>>()?;
    let mut best = t;
    for l in (1..=t).rev() {
        let preds: Vec<BinaryLabel> = paths.iter().map(|p| BinaryLabel::from_sign(p[l - 1])).collect();
        if f1_score(&preds, &truth)? >= f1_floor {
            best = l;
        } else {
            break;
        }
    }
    Ok(best)
}
