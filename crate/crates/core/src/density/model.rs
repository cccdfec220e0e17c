use crate::density::dy::DyDistribution;
use crate::density::gaussian::Gaussian;
use crate::error::Result;
use crate::nn::NnDensity;
use crate::params::{FtVariant, HestonParams, TimeLag};

/// A fitted one-dimensional density that the goodness-of-fit tests can query.
pub trait Distribution {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn quantile(&self, q: f64) -> Result<f64>;
    /// Number of fitted parameters charged against the chi-square degrees of freedom.
    fn param_count(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ModelKind {
    Gaussian,
    Dy,
    Nn,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Gaussian => "gaussian",
            ModelKind::Dy => "dy",
            ModelKind::Nn => "nn",
        }
    }
}

impl Distribution for Gaussian {
    fn pdf(&self, x: f64) -> f64 {
        Gaussian::pdf(self, x)
    }
    fn cdf(&self, x: f64) -> f64 {
        Gaussian::cdf(self, x)
    }
    fn quantile(&self, q: f64) -> Result<f64> {
        Gaussian::quantile(self, q)
    }
    fn param_count(&self) -> usize {
        2
    }
}

/// Heston density of the observed (not drift-adjusted) return at one lag:
/// `pdf(r) = P_t(r - mu t)`.
#[derive(Debug, Clone)]
pub struct DyModel {
    shift: f64,
    dist: DyDistribution,
}

impl DyModel {
    pub fn new(params: &HestonParams, tau: TimeLag, variant: FtVariant) -> Result<Self> {
        let dist = DyDistribution::new(params, tau, variant)?;
        Ok(Self {
            shift: params.mu * tau.as_f64(),
            dist,
        })
    }

    pub fn params(&self) -> &HestonParams {
        self.dist.params()
    }

    pub fn tau(&self) -> TimeLag {
        self.dist.tau()
    }

    pub fn distribution(&self) -> &DyDistribution {
        &self.dist
    }
}

impl Distribution for DyModel {
    fn pdf(&self, x: f64) -> f64 {
        self.dist.pdf(x - self.shift)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.dist.cdf(x - self.shift)
    }
    fn quantile(&self, q: f64) -> Result<f64> {
        Ok(self.dist.quantile(q)? + self.shift)
    }
    fn param_count(&self) -> usize {
        4
    }
}

/// Any of the three candidate densities.
#[derive(Debug, Clone)]
pub enum DensityModel {
    Gaussian(Gaussian),
    Dy(DyModel),
    Nn(NnDensity),
}

impl DensityModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            DensityModel::Gaussian(_) => ModelKind::Gaussian,
            DensityModel::Dy(_) => ModelKind::Dy,
            DensityModel::Nn(_) => ModelKind::Nn,
        }
    }

    fn inner(&self) -> &dyn Distribution {
        match self {
            DensityModel::Gaussian(g) => g,
            DensityModel::Dy(d) => d,
            DensityModel::Nn(n) => n,
        }
    }
}

impl Distribution for DensityModel {
    fn pdf(&self, x: f64) -> f64 {
        self.inner().pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.inner().cdf(x)
    }
    fn quantile(&self, q: f64) -> Result<f64> {
        self.inner().quantile(q)
    }
    fn param_count(&self) -> usize {
        self.inner().param_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        let g = DensityModel::Gaussian(Gaussian::new(0.0, 1.0).unwrap());
        assert_eq!(g.param_count(), 2);
        assert_eq!(g.kind(), ModelKind::Gaussian);
        let p = HestonParams::new(2.0, 0.04, 0.3, 0.01, 0.0).unwrap();
        let d = DensityModel::Dy(DyModel::new(&p, TimeLag::new(1).unwrap(), FtVariant::ThreeTerm).unwrap());
        assert_eq!(d.param_count(), 4);
    }

    #[test]
    fn drift_shifts_location() {
        let tau = TimeLag::new(2).unwrap();
        let base = HestonParams::new(2.0, 0.04, 0.3, 0.0, 0.0).unwrap();
        let moved = HestonParams { mu: 0.05, ..base };
        let a = DyModel::new(&base, tau, FtVariant::ThreeTerm).unwrap();
        let b = DyModel::new(&moved, tau, FtVariant::ThreeTerm).unwrap();
        assert!((a.pdf(0.03) - b.pdf(0.13)).abs() < 1e-12);
        assert!((a.quantile(0.3).unwrap() + 0.1 - b.quantile(0.3).unwrap()).abs() < 1e-12);
    }
}
