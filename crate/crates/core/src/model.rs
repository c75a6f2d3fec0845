//! Common fit/predict surface over every classifier and the serialized
//! model container.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::interval::{IntervalTree, DEFAULT_INTERVALS};
use crate::baselines::rocket::{generate_kernels, rocket_features, RocketKernel, DEFAULT_KERNELS};
use crate::baselines::{column_concat, ConcatModel, EnsembleVote, KnnModel, RidgeModel, UnivariateSpec, LAMBDA_GRID};
use crate::chemtime::{self, Boost, ChemTimeModel, EmbeddingTable, HyperParams};
use crate::data::{BinaryLabel, Dataset, MTSample};
use crate::error::{Error, Result};

pub trait Classifier: Send + Sync {
    fn predict(&self, sample: &MTSample) -> Result<BinaryLabel>;

    /// True when the model consumes one step at a time, so only the final
    /// step's processing delays a decision.
    fn is_streaming(&self) -> bool {
        false
    }
}

pub trait Learner: Send + Sync {
    fn name(&self) -> String;
    fn fit(&self, train: &Dataset) -> Result<Box<dyn Classifier>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoostMode {
    #[default]
    Margin,
    NearestTarget,
}

/// Untrained model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    Chemtime {
        #[serde(default)]
        hp: HyperParams,
        #[serde(default)]
        boost: BoostMode,
        /// Latent table; the unit-circle layout over the dataset's
        /// analytes when absent.
        #[serde(default)]
        table: Option<EmbeddingTable>,
    },
    Rocket {
        kernels: usize,
        seed: u64,
    },
    KnnConcat {
        k: usize,
    },
    RidgeConcat,
    IntervalTree {
        intervals: usize,
        seed: u64,
    },
    DtwConcat {
        band: f64,
    },
    DtwEnsemble {
        band: f64,
    },
    /// Reads the label off the sample's concentrations. Harness check only.
    Oracle,
    /// Seeded per-sample coin flip. Harness check only.
    CoinFlip {
        seed: u64,
    },
}

impl ModelSpec {
    pub fn chemtime(hp: HyperParams) -> Self {
        ModelSpec::Chemtime {
            hp,
            boost: BoostMode::Margin,
            table: None,
        }
    }

    /// The competitor families plus the recurrent embedder, all seeded from
    /// `seed`.
    pub fn default_roster(seed: u64) -> Vec<ModelSpec> {
        vec![
            ModelSpec::chemtime(HyperParams {
                seed,
                ..Default::default()
            }),
            ModelSpec::Rocket {
                kernels: DEFAULT_KERNELS,
                seed,
            },
            ModelSpec::KnnConcat { k: 1 },
            ModelSpec::RidgeConcat,
            ModelSpec::IntervalTree {
                intervals: DEFAULT_INTERVALS,
                seed,
            },
            ModelSpec::DtwConcat { band: 0.1 },
            ModelSpec::DtwEnsemble { band: 0.1 },
        ]
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            ModelSpec::Chemtime { hp, boost, table } => ModelSpec::Chemtime {
                hp: HyperParams { seed, ..hp },
                boost,
                table,
            },
            ModelSpec::Rocket { kernels, .. } => ModelSpec::Rocket { kernels, seed },
            ModelSpec::IntervalTree { intervals, .. } => ModelSpec::IntervalTree { intervals, seed },
            ModelSpec::CoinFlip { .. } => ModelSpec::CoinFlip { seed },
            other => other,
        }
    }

    pub fn fit_model(&self, train: &Dataset) -> Result<FittedModel> {
        if train.is_empty() {
            return Err(Error::arg(format!("{}: empty training set", self.name())));
        }
        let model = match self {
            ModelSpec::Chemtime { hp, boost, table } => {
                let table = table
                    .clone()
                    .unwrap_or_else(|| EmbeddingTable::unit_circle(&train.analyte_names));
                let model = chemtime::train(train, &table, hp)?;
                let boost = match boost {
                    BoostMode::Margin => Boost::Margin(chemtime::fit_boost(&model, train)?),
                    BoostMode::NearestTarget => Boost::NearestTarget,
                };
                FittedModel::Chemtime(model.with_boost(boost))
            }
            ModelSpec::Rocket { kernels, seed } => {
                let kernels = generate_kernels(train.n_channels(), train.min_len(), *kernels, *seed)?;
                let rows = train
                    .samples
                    .iter()
                    .map(|s| rocket_features(&s.channels, &kernels))
                    .collect::<Result<Vec<_>>>()?;
                let ridge = RidgeModel::fit(&rows, &train.labels(), &LAMBDA_GRID)?;
                FittedModel::Rocket { kernels, ridge }
            }
            ModelSpec::KnnConcat { k } => FittedModel::Knn(KnnModel::fit(train, *k)?),
            ModelSpec::RidgeConcat => {
                let rows = column_concat(train)?;
                FittedModel::RidgeConcat(RidgeModel::fit(&rows, &train.labels(), &LAMBDA_GRID)?)
            }
            ModelSpec::IntervalTree { intervals, seed } => {
                FittedModel::IntervalTree(IntervalTree::fit(train, *intervals, *seed)?)
            }
            ModelSpec::DtwConcat { band } => {
                FittedModel::Concat(ConcatModel::fit(train, &UnivariateSpec::Dtw { band: *band })?)
            }
            ModelSpec::DtwEnsemble { band } => {
                FittedModel::Ensemble(EnsembleVote::fit(train, &UnivariateSpec::Dtw { band: *band })?)
            }
            ModelSpec::Oracle => FittedModel::Oracle {
                positive_index: train.positive_index()?,
            },
            ModelSpec::CoinFlip { seed } => FittedModel::CoinFlip { seed: *seed },
        };
        Ok(model)
    }

    pub fn name(&self) -> String {
        match self {
            ModelSpec::Chemtime {
                boost: BoostMode::NearestTarget,
                ..
            } => "chemtime-nearest".into(),
            ModelSpec::Chemtime { .. } => "chemtime".into(),
            ModelSpec::Rocket { .. } => "rocket".into(),
            ModelSpec::KnnConcat { .. } => "knn-concat".into(),
            ModelSpec::RidgeConcat => "ridge-concat".into(),
            ModelSpec::IntervalTree { .. } => "interval-tree".into(),
            ModelSpec::DtwConcat { .. } => "dtw-concat".into(),
            ModelSpec::DtwEnsemble { .. } => "dtw-ensemble".into(),
            ModelSpec::Oracle => "oracle".into(),
            ModelSpec::CoinFlip { .. } => "coin-flip".into(),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// Default configuration of a model by name.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "chemtime" => ModelSpec::chemtime(HyperParams::default()),
            "chemtime-nearest" => ModelSpec::Chemtime {
                hp: HyperParams::default(),
                boost: BoostMode::NearestTarget,
                table: None,
            },
            "rocket" => ModelSpec::Rocket {
                kernels: DEFAULT_KERNELS,
                seed: 0,
            },
            "knn-concat" => ModelSpec::KnnConcat { k: 1 },
            "ridge-concat" => ModelSpec::RidgeConcat,
            "interval-tree" => ModelSpec::IntervalTree {
                intervals: DEFAULT_INTERVALS,
                seed: 0,
            },
            "dtw-concat" => ModelSpec::DtwConcat { band: 0.1 },
            "dtw-ensemble" => ModelSpec::DtwEnsemble { band: 0.1 },
            "oracle" => ModelSpec::Oracle,
            "coin-flip" => ModelSpec::CoinFlip { seed: 0 },
            other => return Err(Error::arg(format!("unknown model `{other}`"))),
        })
    }
}

impl Learner for ModelSpec {
    fn name(&self) -> String {
        ModelSpec::name(self)
    }

    fn fit(&self, train: &Dataset) -> Result<Box<dyn Classifier>> {
        Ok(Box::new(self.fit_model(train)?))
    }
}

/// Trained model of any kind, as stored in model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FittedModel {
    Chemtime(ChemTimeModel),
    Rocket { kernels: Vec<RocketKernel>, ridge: RidgeModel },
    Knn(KnnModel),
    RidgeConcat(RidgeModel),
    IntervalTree(IntervalTree),
    Concat(ConcatModel),
    Ensemble(EnsembleVote),
    Oracle { positive_index: usize },
    CoinFlip { seed: u64 },
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

impl Classifier for FittedModel {
    fn predict(&self, sample: &MTSample) -> Result<BinaryLabel> {
        match self {
            FittedModel::Chemtime(m) => Ok(m.predict(sample, sample.len())?.label),
            FittedModel::Rocket { kernels, ridge } => Ok(ridge.predict(&rocket_features(&sample.channels, kernels)?)),
            FittedModel::Knn(m) => m.predict(sample),
            FittedModel::RidgeConcat(m) => Ok(m.predict(&crate::baselines::concat_channels(&sample.channels))),
            FittedModel::IntervalTree(m) => m.predict(sample),
            FittedModel::Concat(m) => m.predict(sample),
            FittedModel::Ensemble(m) => m.predict(sample),
            FittedModel::Oracle { positive_index } => {
                Ok(BinaryLabel::from_concentrations(&sample.concentrations, *positive_index))
            }
            FittedModel::CoinFlip { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(&sample.id));
                Ok(if rng.random_bool(0.5) {
                    BinaryLabel::Positive
                } else {
                    BinaryLabel::Negative
                })
            }
        }
    }

    fn is_streaming(&self) -> bool {
        matches!(self, FittedModel::Chemtime(_))
    }
}

/// On-disk model: a name and the tagged parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub model: FittedModel,
}

impl ModelFile {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse {
            what: "model".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "model".into(),
            message: e.to_string(),
        })
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
