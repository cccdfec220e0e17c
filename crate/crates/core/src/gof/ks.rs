//! Kolmogorov-Smirnov statistic with the asymptotic p-value.

use alloc::vec::Vec;

use crate::density::Distribution;
use crate::error::{domain, Error, Result};

/// Right-continuous empirical CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if sample.iter().any(|x| x.is_nan()) {
            return Err(Error::Invalid("sample contains NaN".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    /// Fraction of the sample `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// `max_i max(|i/N - F(x_i)|, |(i-1)/N - F(x_i)|)` over the order statistics.
pub fn ks_statistic_with(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let ecdf = Ecdf::new(sample)?;
    let n = ecdf.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in ecdf.sorted().iter().enumerate() {
        let f = cdf(x);
        if !f.is_finite() {
            return Err(domain("cdf", f, "model CDF is not finite"));
        }
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above.abs()).max(below.abs());
    }
    Ok(d)
}

pub fn ks_statistic<D: Distribution + ?Sized>(sample: &[f64], model: &D) -> Result<f64> {
    ks_statistic_with(sample, |x| model.cdf(x))
}

/// Kolmogorov survival function `Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`.
///
/// Below `lambda = 1.18` the alternating series converges slowly, so the
/// equivalent theta-function form
/// `1 - sqrt(2 pi)/lambda sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 lambda^2))` is used.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        let mut sum = 0.0;
        for k in 1..200 {
            let odd = (2 * k - 1) as f64;
            let term = (-odd * odd * pi2 / (8.0 * lambda * lambda)).exp();
            sum += term;
            if term <= 1e-16 * sum {
                break;
            }
        }
        let cdf = (2.0 * core::f64::consts::PI).sqrt() / lambda * sum;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term <= 1e-12 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the small-sample scaling
/// `lambda = (sqrt(N) + 0.12 + 0.11 / sqrt(N)) Z`.
pub fn ks_pvalue(statistic: f64, n: usize) -> Result<f64> {
    if !(statistic >= 0.0) {
        return Err(domain("Z", statistic, "statistic must be >= 0"));
    }
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let root = (n as f64).sqrt();
    Ok(kolmogorov_q((root + 0.12 + 0.11 / root) * statistic))
}
