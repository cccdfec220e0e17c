//! Histogram construction and model calibration.

mod fit;
mod histogram;
mod objective;
mod simplex;

pub use fit::{dy_objective, fit_dy, fit_gaussian, moment_guess, DyFitConfig, FitReport};
pub use histogram::{sorted_quantile, BinRule, EmpiricalPdf, MIN_HISTOGRAM_SAMPLE};
pub use objective::{objective_e, objective_with, Loss, ObjectiveValue};
pub use simplex::{nelder_mead, SimplexConfig, SimplexResult};
