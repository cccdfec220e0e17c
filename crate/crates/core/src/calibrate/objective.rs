//! Log-deviation fit objective between model and empirical densities.

use alloc::vec::Vec;

use super::histogram::EmpiricalPdf;
use crate::density::Distribution;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Loss {
    /// `|ln P* - ln P|`.
    #[default]
    AbsoluteLog,
    /// `(ln P* - ln P)^2`.
    SquaredLog,
}

impl Loss {
    fn apply(self, diff: f64) -> f64 {
        match self {
            Loss::AbsoluteLog => diff.abs(),
            Loss::SquaredLog => diff * diff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectiveValue {
    pub value: f64,
    /// Bins that entered the sum.
    pub evaluated: usize,
    /// Empty bins left out because `ln 0` is undefined.
    pub skipped: usize,
}

/// Sums the loss over every populated bin of every histogram.
///
/// `model_pdf(i, xs)` returns the model density of lag `i` at the bin
/// centers `xs`. A zero or non-finite model density makes the value infinite.
pub fn objective_with(
    pdfs: &[EmpiricalPdf],
    loss: Loss,
    mut model_pdf: impl FnMut(usize, &[f64]) -> Result<Vec<f64>>,
) -> Result<ObjectiveValue> {
    let mut value = 0.0;
    let mut evaluated = 0;
    let mut skipped = 0;
    for (i, pdf) in pdfs.iter().enumerate() {
        let (xs, ps): (Vec<f64>, Vec<f64>) = pdf.populated().unzip();
        skipped += pdf.len() - xs.len();
        if xs.is_empty() {
            continue;
        }
        let model = model_pdf(i, &xs)?;
        for (&p_emp, &p_model) in ps.iter().zip(&model) {
            if !(p_model > 0.0 && p_model.is_finite()) {
                value = f64::INFINITY;
            } else {
                value += loss.apply(p_emp.ln() - p_model.ln());
            }
        }
        evaluated += xs.len();
    }
    Ok(ObjectiveValue {
        value,
        evaluated,
        skipped,
    })
}

/// Objective for one fitted model per histogram.
pub fn objective_e<D: Distribution>(models: &[D], pdfs: &[EmpiricalPdf], loss: Loss) -> Result<ObjectiveValue> {
    if models.len() != pdfs.len() {
        return Err(crate::Error::Invalid(alloc::format!(
            "{} models for {} histograms",
            models.len(),
            pdfs.len()
        )));
    }
    objective_with(pdfs, loss, |i, xs| Ok(xs.iter().map(|&x| models[i].pdf(x)).collect()))
}
