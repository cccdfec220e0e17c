//! Equal-width histograms normalised as probability densities.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::TimeLag;

/// Smallest sample accepted by [`EmpiricalPdf::from_sample`].
pub const MIN_HISTOGRAM_SAMPLE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BinRule {
    /// Width `2 IQR / N^(1/3)`, rounded so the bins tile `[min, max]`.
    #[default]
    FreedmanDiaconis,
    /// A fixed number of equal-width bins.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalPdf {
    pub tau: TimeLag,
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    pub densities: Vec<f64>,
    /// Raw counts; empty for histograms built from exact densities.
    pub counts: Vec<usize>,
}

impl EmpiricalPdf {
    pub fn from_sample(sample: &[f64], tau: TimeLag, rule: BinRule) -> Result<Self> {
        if sample.len() < MIN_HISTOGRAM_SAMPLE {
            return Err(Error::InsufficientData {
                needed: MIN_HISTOGRAM_SAMPLE,
                got: sample.len(),
            });
        }
        if sample.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("sample contains non-finite values".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        if min == max {
            return Err(Error::Degenerate("all sample values are equal"));
        }
        let range = max - min;
        let n = sorted.len();
        let bins = match rule {
            BinRule::Count(b) if b == 0 => return Err(Error::Invalid("bin count must be >= 1".into())),
            BinRule::Count(b) => b,
            BinRule::FreedmanDiaconis => {
                let iqr = sorted_quantile(&sorted, 0.75) - sorted_quantile(&sorted, 0.25);
                if iqr > 0.0 {
                    let w = 2.0 * iqr / libm::cbrt(n as f64);
                    ((range / w).ceil() as usize).clamp(1, n)
                } else {
                    libm::sqrt(n as f64).ceil() as usize
                }
            }
        };
        let width = range / bins as f64;
        let mut counts = alloc::vec![0usize; bins];
        for &x in &sorted {
            let b = (((x - min) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let centers = (0..bins).map(|b| min + (b as f64 + 0.5) * width).collect();
        let densities = counts.iter().map(|&c| c as f64 / (n as f64 * width)).collect();
        Ok(Self {
            tau,
            centers,
            widths: alloc::vec![width; bins],
            densities,
            counts,
        })
    }

    /// Histogram whose bin values are given exactly, rescaled to unit mass.
    pub fn from_densities(tau: TimeLag, centers: Vec<f64>, widths: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || centers.len() != widths.len() || centers.len() != densities.len() {
            return Err(Error::Invalid("centers, widths and densities must have equal non-zero length".into()));
        }
        if widths.iter().any(|w| !(*w > 0.0)) || densities.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::Invalid("widths must be > 0 and densities finite and >= 0".into()));
        }
        for i in 1..centers.len() {
            if centers[i] - 0.5 * widths[i] < centers[i - 1] + 0.5 * widths[i - 1] - 1e-12 * widths[i] {
                return Err(Error::Invalid("bins overlap or are out of order".into()));
            }
        }
        let mass: f64 = densities.iter().zip(&widths).map(|(d, w)| d * w).sum();
        if !(mass > 0.0) {
            return Err(Error::Degenerate("histogram has zero mass"));
        }
        let densities = densities.into_iter().map(|d| d / mass).collect();
        Ok(Self {
            tau,
            centers,
            widths,
            densities,
            counts: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.densities.iter().zip(&self.widths).map(|(d, w)| d * w).sum()
    }

    /// `(center, density)` for bins with positive density.
    pub fn populated(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.centers
            .iter()
            .zip(&self.densities)
            .filter(|(_, &d)| d > 0.0)
            .map(|(&x, &d)| (x, d))
    }

    /// Mean and variance of the histogram treated as a piecewise-constant density.
    pub fn moments(&self) -> (f64, f64) {
        let mass = self.mass();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for ((&x, &d), &w) in self.centers.iter().zip(&self.densities).zip(&self.widths) {
            let p = d * w / mass;
            m1 += p * x;
            m2 += p * (x * x + w * w / 12.0);
        }
        (m1, m2 - m1 * m1)
    }
}

/// Linear-interpolation quantile of a sorted slice.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let i = h.floor() as usize;
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[i] + (h - i as f64) * (sorted[i + 1] - sorted[i])
}
