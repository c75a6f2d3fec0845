//! Competitor classifiers and the univariate-to-multivariate adapters.

pub mod adapters;
pub mod interval;
pub mod knn;
pub mod ridge;
pub mod rocket;
pub mod univariate;

pub use adapters::{column_concat, concat_channels, majority_vote, split_channels, ConcatModel, EnsembleVote};
pub use interval::IntervalTree;
pub use knn::KnnModel;
pub use ridge::{ridge_solve, RidgeModel, LAMBDA_GRID};
pub use rocket::{generate_kernels, rocket_features, RocketKernel};
pub use univariate::{UnivariateModel, UnivariateSpec};
