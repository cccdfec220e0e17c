//! Cross-path summary of a goodness-of-fit statistic.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// p-values at `mean + std`, `mean`, `mean - std`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PValueTriple {
    pub upper: f64,
    pub mean: f64,
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GofResult {
    pub per_path: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation; `None` for a single path.
    pub std: Option<f64>,
    /// Degrees of freedom, for chi-square results.
    pub df: Option<usize>,
    /// p-value at the mean statistic.
    pub p_value: f64,
    /// Full triple when more than one path was tested.
    pub p_triple: Option<PValueTriple>,
}

/// Mean and population std of per-path statistics with p-values at `mean` and `mean +- std`.
///
/// `mean - std` is floored at zero, where every statistic here has p-value 1.
pub fn aggregate_paths(
    per_path: &[f64],
    df: Option<usize>,
    mut pvalue: impl FnMut(f64) -> Result<f64>,
) -> Result<GofResult> {
    if per_path.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let n = per_path.len() as f64;
    let mean = per_path.iter().sum::<f64>() / n;
    let p_mean = pvalue(mean)?;
    let (std, p_triple) = if per_path.len() == 1 {
        (None, None)
    } else {
        let var = per_path.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        let upper = pvalue(mean + std)?.min(p_mean);
        let lower = pvalue((mean - std).max(0.0))?.max(p_mean);
        (
            Some(std),
            Some(PValueTriple {
                upper,
                mean: p_mean,
                lower,
            }),
        )
    };
    Ok(GofResult {
        per_path: per_path.to_vec(),
        mean,
        std,
        df,
        p_value: p_mean,
        p_triple,
    })
}
