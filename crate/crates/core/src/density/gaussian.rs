//! Normal baseline density.


use crate::error::{domain, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn gaussian_pdf(mean: f64, std: f64, x: f64) -> Result<f64> {
    Ok(Gaussian::new(mean, std)?.pdf(x))
}

pub fn gaussian_cdf(mean: f64, std: f64, x: f64) -> Result<f64> {
    Ok(Gaussian::new(mean, std)?.cdf(x))
}

pub fn gaussian_quantile(mean: f64, std: f64, q: f64) -> Result<f64> {
    Gaussian::new(mean, std)?.quantile(q)
}

/// Standard normal quantile: Acklam's rational approximation (relative error
/// about 1e-9) polished with one Newton step on the exact CDF.
pub fn standard_normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain("q", q, "quantile level must lie in (0, 1)"));
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    const LOW: f64 = 0.02425;
    let x = if q < LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else if q <= 1.0 - LOW {
        let r = q - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    } else {
        let r = (-2.0 * (1.0 - q).ln()).sqrt();
        -(((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    // Newton on the tail that is not subject to cancellation.
    let density = FRAC_1_SQRT_2PI * (-0.5 * x * x).exp();
    let err = if q < 0.5 {
        standard_normal_cdf(x) - q
    } else {
        (1.0 - q) - standard_normal_sf(x)
    };
    Ok(x - err / density)
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * core::f64::consts::FRAC_1_SQRT_2)
}

pub fn standard_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * core::f64::consts::FRAC_1_SQRT_2)
}

/// Normal distribution with a given mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gaussian {
    mean: f64,
    std: f64,
}

impl Gaussian {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(domain("mean", mean, "must be finite"));
        }
        if !(std.is_finite() && std > 0.0) {
            return Err(domain("std", std, "must be finite and > 0"));
        }
        Ok(Self { mean, std })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        FRAC_1_SQRT_2PI * (-0.5 * z * z).exp() / self.std
    }

    pub fn cdf(&self, x: f64) -> f64 {
        standard_normal_cdf((x - self.mean) / self.std)
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        Ok(self.mean + self.std * standard_normal_quantile(q)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((gaussian_pdf(0.0, 1.0, 0.0).unwrap() - 0.3989422804).abs() < 1e-9);
        assert_eq!(gaussian_cdf(0.0, 1.0, 0.0).unwrap(), 0.5);
        let q = gaussian_cdf(0.0, 1.0, 1.96).unwrap();
        assert!((gaussian_quantile(0.0, 1.0, q).unwrap() - 1.96).abs() < 1e-8);
    }

    #[test]
    fn tabulated_quartiles() {
        let q = standard_normal_quantile(0.75).unwrap();
        assert!((q - 0.674_489_750_196_081_7).abs() < 1e-12);
        let q = standard_normal_quantile(1e-10).unwrap();
        assert!((q + 6.361_340_902_404_056).abs() < 1e-9);
        assert!((standard_normal_cdf(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
    }

    #[test]
    fn quantile_round_trip_over_levels() {
        for i in 1..1000 {
            let q = i as f64 / 1000.0;
            let x = standard_normal_quantile(q).unwrap();
            assert!((standard_normal_cdf(x) - q).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(Gaussian::new(0.0, 0.0).is_err());
        assert!(Gaussian::new(0.0, -1.0).is_err());
        assert!(gaussian_pdf(0.0, f64::NAN, 1.0).is_err());
        assert!(standard_normal_quantile(0.0).is_err());
    }
}
