//! Normalised density from a network output on a bounded window: `exp(f)`
//! for a log-density fit, `max(f, 0)` for a direct density fit.

use alloc::vec::Vec;

use super::mlp::MlpParams;
use super::train::NnTarget;
use crate::density::grid::{gauss_legendre, invert_cdf, CdfTable};
use crate::density::Distribution;
use crate::error::{domain, Error, Result};

/// Integration cells across the window.
const CELLS: usize = 2048;
/// Fraction of the data range added on each side of the window.
pub const WINDOW_MARGIN: f64 = 0.1;

/// Serialized form: the network and its window.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NnSpec {
    pub params: MlpParams,
    /// What the network output was trained to represent.
    #[cfg_attr(feature = "serde", serde(default))]
    pub output: NnTarget,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "NnSpec", try_from = "NnSpec"))]
pub struct NnDensity {
    spec: NnSpec,
    /// `max` of the network output on the grid, subtracted before exponentiating.
    offset: f64,
    norm: f64,
    table: CdfTable,
}

impl From<NnDensity> for NnSpec {
    fn from(d: NnDensity) -> Self {
        d.spec
    }
}

impl TryFrom<NnSpec> for NnDensity {
    type Error = Error;
    fn try_from(spec: NnSpec) -> Result<Self> {
        NnDensity::with_output(spec.params, spec.output, spec.lo, spec.hi)
    }
}

fn shape(output: NnTarget, f: f64, offset: f64) -> f64 {
    match output {
        NnTarget::LogDensity => (f - offset).exp(),
        NnTarget::Density => f.max(0.0),
    }
}

impl NnDensity {
    /// Density `exp(network(x))` renormalised over `[lo, hi]`.
    pub fn new(params: MlpParams, lo: f64, hi: f64) -> Result<Self> {
        Self::with_output(params, NnTarget::LogDensity, lo, hi)
    }

    pub fn with_output(params: MlpParams, output: NnTarget, lo: f64, hi: f64) -> Result<Self> {
        if !params.is_finite() {
            return Err(Error::Invalid("network parameters must be finite".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(domain("hi", hi, "window must satisfy lo < hi"));
        }
        let width = (hi - lo) / CELLS as f64;
        let offset = match output {
            NnTarget::LogDensity => (0..=CELLS)
                .map(|i| params.forward(lo + width * i as f64))
                .fold(f64::NEG_INFINITY, f64::max),
            NnTarget::Density => 0.0,
        };
        let spec = NnSpec { params, output, lo, hi };
        let raw = |x: f64| shape(output, params.forward(x), offset);
        let mut cumulative = Vec::with_capacity(CELLS + 1);
        cumulative.push(0.0);
        let mut total = 0.0;
        for i in 0..CELLS {
            let a = lo + width * i as f64;
            total += gauss_legendre(a, a + width, raw);
            cumulative.push(total);
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Quadrature {
                nodes: CELLS * 8,
                change: total,
            });
        }
        let mut index = 0;
        let table = CdfTable::tabulate(lo, hi, CELLS + 1, |_| {
            let c = cumulative[index] / total;
            index += 1;
            c
        });
        Ok(Self {
            spec,
            offset,
            norm: total,
            table,
        })
    }

    /// Window spanning the data range widened by [`WINDOW_MARGIN`] on each side.
    pub fn for_data_range(params: MlpParams, output: NnTarget, data_min: f64, data_max: f64) -> Result<Self> {
        let margin = WINDOW_MARGIN * (data_max - data_min);
        Self::with_output(params, output, data_min - margin, data_max + margin)
    }

    pub fn params(&self) -> &MlpParams {
        &self.spec.params
    }

    pub fn window(&self) -> (f64, f64) {
        (self.spec.lo, self.spec.hi)
    }

    fn cell_width(&self) -> f64 {
        (self.spec.hi - self.spec.lo) / CELLS as f64
    }

    pub fn output(&self) -> NnTarget {
        self.spec.output
    }

    fn unnormalised(&self, x: f64) -> f64 {
        shape(self.spec.output, self.spec.params.forward(x), self.offset)
    }
}

impl Distribution for NnDensity {
    fn pdf(&self, x: f64) -> f64 {
        if x < self.spec.lo || x > self.spec.hi {
            return 0.0;
        }
        self.unnormalised(x) / self.norm
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.spec.lo {
            return 0.0;
        }
        if x >= self.spec.hi {
            return 1.0;
        }
        let w = self.cell_width();
        let i = (((x - self.spec.lo) / w) as usize).min(CELLS - 1);
        let a = self.table.xs()[i];
        let base = self.table.values()[i];
        (base + gauss_legendre(a, x, |u| self.unnormalised(u)) / self.norm).clamp(0.0, 1.0)
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        invert_cdf(&self.table, q, |x| (self.cdf(x), self.pdf(x)))
    }

    fn param_count(&self) -> usize {
        self.spec.params.reported_param_count
    }
}
