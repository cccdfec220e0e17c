//! Close-price series and the return datasets built from them.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::params::TimeLag;

/// A calendar date; ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl core::fmt::Display for Date {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// Dated close prices in trading-day order.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<Date>,
    closes: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<Date>, closes: Vec<f64>) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::Invalid(alloc::format!(
                "{} dates but {} closes",
                dates.len(),
                closes.len()
            )));
        }
        if closes.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: closes.len(),
            });
        }
        if let Some(i) = closes.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Invalid(alloc::format!(
                "close #{} is not a positive number: {}",
                i + 1,
                closes[i]
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(alloc::format!(
                "dates not strictly increasing at #{}: {} then {}",
                i + 2,
                dates[i],
                dates[i + 1]
            )));
        }
        Ok(Self { dates, closes })
    }

    /// Prices without dates, indexed by trading day.
    pub fn from_closes(closes: Vec<f64>) -> Result<Self> {
        let dates = (0..closes.len())
            .map(|i| Date {
                year: 1 + (i / 336) as i32,
                month: 1 + ((i / 28) % 12) as u8,
                day: 1 + (i % 28) as u8,
            })
            .collect();
        Self::new(dates, closes)
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }
}

/// The single series `ln(P_{t+tau} / P_t)` for every start day; each price
/// shock is counted `tau` times.
pub fn overlapping_returns(prices: &PriceSeries, tau: TimeLag) -> Result<Vec<f64>> {
    let lag = tau.days() as usize;
    let c = prices.closes();
    if c.len() <= lag {
        return Err(Error::InsufficientData {
            needed: lag + 1,
            got: c.len(),
        });
    }
    Ok(c.windows(lag + 1).map(|w| (w[lag] / w[0]).ln()).collect())
}

/// One of the `tau` interleaved non-overlapping return series.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPath {
    pub tau: TimeLag,
    /// 1-based starting price index.
    pub index: usize,
    pub returns: Vec<f64>,
    pub centred: bool,
}

/// Splits the prices into `tau` paths; path `j` (1-based) holds
/// `ln(P_{j+(i+1)tau} / P_{j+i tau})` for every full stride.
pub fn path_returns(prices: &PriceSeries, tau: TimeLag) -> Result<Vec<ReturnPath>> {
    let lag = tau.days() as usize;
    let c = prices.closes();
    let n = c.len();
    if n < 2 * lag + 1 {
        return Err(Error::InsufficientData {
            needed: 2 * lag + 1,
            got: n,
        });
    }
    Ok((1..=lag)
        .map(|j| {
            let returns = c[j - 1..]
                .iter()
                .step_by(lag)
                .collect::<Vec<_>>()
                .windows(2)
                .map(|w| (w[1] / w[0]).ln())
                .collect();
            ReturnPath {
                tau,
                index: j,
                returns,
                centred: false,
            }
        })
        .collect())
}

/// Inclusive bounds outside which returns are discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrimBounds {
    lower: f64,
    upper: f64,
}

/// Per-lag bounds used in the original overlapping-returns study.
pub const TRIM_TABLE: [(u32, f64, f64); 8] = [
    (1, -0.04, 0.04),
    (5, -0.08, 0.08),
    (20, -0.13, 0.15),
    (40, -0.17, 0.20),
    (80, -0.18, 0.25),
    (100, -0.20, 0.28),
    (200, -0.22, 0.38),
    (250, -0.22, 0.44),
];

impl TrimBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < 0.0) {
            return Err(domain("lower", lower, "trim bound must be negative"));
        }
        if !(upper > 0.0 && upper.is_finite()) {
            return Err(domain("upper", upper, "trim bound must be positive"));
        }
        Ok(Self { lower, upper })
    }

    /// Tabulated bounds for `tau`, if that lag has any.
    pub fn for_lag(tau: TimeLag) -> Option<Self> {
        TRIM_TABLE
            .iter()
            .find(|row| row.0 == tau.days())
            .map(|&(_, lower, upper)| Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.lower && r <= self.upper
    }
}

/// Retained returns and the number discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct Trimmed {
    pub returns: Vec<f64>,
    pub removed: usize,
}

pub fn trim_returns(series: &[f64], bounds: TrimBounds) -> Trimmed {
    let returns: Vec<f64> = series.iter().copied().filter(|&r| bounds.contains(r)).collect();
    Trimmed {
        removed: series.len() - returns.len(),
        returns,
    }
}

pub fn mean(series: &[f64]) -> f64 {
    // two-pass to keep the residual mean at round-off level
    let n = series.len() as f64;
    let m = series.iter().sum::<f64>() / n;
    m + series.iter().map(|x| x - m).sum::<f64>() / n
}

/// Subtracts the sample mean, the per-lag estimate of `mu t`.
pub fn center_returns(series: &[f64]) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let m = mean(series);
    Ok(series.iter().map(|x| x - m).collect())
}

/// Subtracts a drift scaled by the lag, `r - mu tau`.
pub fn center_with_drift(series: &[f64], mu: f64, tau: TimeLag) -> Vec<f64> {
    let shift = mu * tau.as_f64();
    series.iter().map(|x| x - shift).collect()
}

/// Excess kurtosis `m4 / m2^2 - 3` with population moments.
pub fn excess_kurtosis(series: &[f64]) -> Result<f64> {
    if series.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: series.len(),
        });
    }
    let m = mean(series);
    let n = series.len() as f64;
    let (m2, m4) = series.iter().fold((0.0, 0.0), |(s2, s4), x| {
        let d = (x - m) * (x - m);
        (s2 + d, s4 + d * d)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    if !(m2 > 0.0) {
        return Err(Error::Degenerate("zero variance"));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Population variance.
pub fn variance(series: &[f64]) -> f64 {
    let m = mean(series);
    series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / series.len() as f64
}
