//! Goodness-of-fit tests and their cross-path aggregation.

mod aggregate;
mod chi2;
mod ks;

pub use aggregate::{aggregate_paths, GofResult, PValueTriple};
pub use chi2::{chi2_pvalue, chi2_statistic, equal_freq_bins, expected_under, regularized_gamma_q, BinPartition, MIN_BINS};
pub use ks::{kolmogorov_q, ks_pvalue, ks_statistic, ks_statistic_with, Ecdf};
