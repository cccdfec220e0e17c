//! Small feed-forward network used as an over-fitting density benchmark.

mod density;
mod mlp;
mod train;

pub use density::{NnDensity, NnSpec, WINDOW_MARGIN};
pub use mlp::{tansig, MlpParams, DEFAULT_REPORTED_PARAMS, HIDDEN, STORED_PARAMS};
pub use train::{train_mlp, train_on, NnTarget, TrainConfig, TrainReport, MIN_TRAINING_BINS};
