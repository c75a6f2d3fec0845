//! Early classification of chemiresistive sensor-array exposures.
//!
//! The crate bundles a recurrent moving-target embedding classifier
//! ([`chemtime`]), a set of competitor models with univariate adapters
//! ([`baselines`]), a synthetic sensor-array generator ([`simgen`]) and the
//! evaluation protocols used to compare them ([`eval`]).

pub mod baselines;
pub mod chemtime;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod simgen;

pub use data::{f1_score, prefix, seconds_to_steps, BinaryLabel, Dataset, MTSample, PredictionResult};
pub use error::{Error, Result};
pub use model::{Classifier, FittedModel, Learner, ModelFile, ModelSpec};
