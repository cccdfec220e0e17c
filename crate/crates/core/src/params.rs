//! Model parameters and time lags.

use crate::error::{domain, Result};

/// Parameters of the square-root stochastic variance model.
///
/// All rates are per trading day: `gamma` is the relaxation rate of the
/// variance towards `theta`, `k` the variance noise, `mu` the drift of the
/// log-price and `rho` the correlation between the two Wiener processes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HestonParams {
    pub gamma: f64,
    pub theta: f64,
    pub k: f64,
    pub mu: f64,
    pub rho: f64,
}

impl HestonParams {
    pub fn new(gamma: f64, theta: f64, k: f64, mu: f64, rho: f64) -> Result<Self> {
        let params = Self {
            gamma,
            theta,
            k,
            mu,
            rho,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(domain("gamma", self.gamma, "must be finite and > 0"));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(domain("theta", self.theta, "must be finite and > 0"));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(domain("k", self.k, "must be finite and > 0"));
        }
        if !self.mu.is_finite() {
            return Err(domain("mu", self.mu, "must be finite"));
        }
        if !(self.rho.abs() <= 1.0) {
            return Err(domain("rho", self.rho, "must lie in [-1, 1]"));
        }
        if !self.feller_ratio().is_finite() {
            return Err(domain("k", self.k, "2 gamma theta / k^2 overflows"));
        }
        Ok(())
    }

    /// `2 gamma theta / k^2`; the exponent of the stationary variance law.
    /// Values below one mean the variance touches zero, which is allowed.
    pub fn feller_ratio(&self) -> f64 {
        2.0 * self.gamma * self.theta / (self.k * self.k)
    }

    /// Stationary standard deviation of the variance process, `k sqrt(theta / (2 gamma))`.
    pub fn stationary_variance_std(&self) -> f64 {
        self.k * (self.theta / (2.0 * self.gamma)).sqrt()
    }
}

/// A return horizon in trading days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u32", into = "u32"))]
pub struct TimeLag(u32);

impl TimeLag {
    pub fn new(days: u32) -> Result<Self> {
        if days == 0 {
            return Err(domain("tau", 0.0, "time lag must be at least one day"));
        }
        Ok(Self(days))
    }

    pub fn days(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<u32> for TimeLag {
    type Error = crate::Error;
    fn try_from(days: u32) -> Result<Self> {
        Self::new(days)
    }
}

impl From<TimeLag> for u32 {
    fn from(t: TimeLag) -> u32 {
        t.0
    }
}

impl core::fmt::Display for TimeLag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which form of the characteristic exponent to evaluate.
///
/// `ThreeTerm` keeps the correlation-ratio logarithm; it vanishes when
/// `rho == 0`, so both variants agree there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FtVariant {
    #[default]
    ThreeTerm,
    OneTerm,
}
