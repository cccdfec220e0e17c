//! The characteristic exponent `F_t(p)` of centred log-returns.
//!
//! With `Gamma = gamma + i rho k p` and `Omega = sqrt(Gamma^2 + k^2 (p^2 - i p))`
//! the exponent is
//!
//! ```text
//! F_t(p) = gamma Gamma theta t / k^2
//!        - (2 gamma theta / k^2) ln[(cosh(Omega t/2) + gamma/Omega sinh(Omega t/2))
//!                                   / (cosh(Omega t/2) + Gamma/Omega sinh(Omega t/2))]
//!        - (2 gamma theta / k^2) ln[cosh(Omega t/2)
//!                                   + (Omega^2 - Gamma^2 + 2 gamma Gamma)/(2 gamma Omega) sinh(Omega t/2)]
//! ```
//!
//! Every logarithm is rewritten as `ln(cosh a + b sinh a) = a + ln(1 + (b - 1)(1 - e^{-2a})/2)`
//! and every `b - 1` is expanded so the explicit `1/k^2` cancels. This keeps the
//! evaluation finite for large `|Omega| t` and exact in the `k -> 0` limit,
//! where the naive form loses all digits to cancellation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{FtVariant, HestonParams, TimeLag};

/// The three printed terms of the exponent, already in cancellation-free form.
///
/// `drift` collects the first term together with the `Omega t / 2` pulled out of
/// the last logarithm, `ratio` is the middle logarithm and `main` is the
/// remainder of the last logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTerms {
    pub drift: Complex64,
    pub ratio: Complex64,
    pub main: Complex64,
    pub omega: Complex64,
}

impl ExponentTerms {
    pub fn total(&self, variant: FtVariant) -> Complex64 {
        match variant {
            FtVariant::ThreeTerm => self.drift + self.ratio + self.main,
            FtVariant::OneTerm => self.drift + self.main,
        }
    }
}

/// `ln(1 + z)` accurate for small `|z|`.
pub(crate) fn ln_1p(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

/// Evaluates the decomposed exponent for a real horizon `t` (in days).
///
/// Params are assumed valid; callers that take user input go through
/// [`characteristic_exponent`].
pub fn exponent_terms(params: &HestonParams, t: f64, p: f64) -> Result<ExponentTerms> {
    let g = params.gamma;
    let k = params.k;
    let k2 = k * k;
    let scale = 2.0 * g * params.theta / k2;

    let gamma_c = Complex64::new(g, params.rho * k * p);
    // k^2 (p^2 - i p)
    let kq = Complex64::new(k2 * p * p, -k2 * p);
    let omega_sq = gamma_c * gamma_c + kq;
    // Re(Omega^2) = gamma^2 + (1 - rho^2) k^2 p^2 >= gamma^2 for valid params.
    if !(omega_sq.re > 0.0) {
        return Err(Error::BranchCut { frequency: p });
    }
    let omega = omega_sq.sqrt();
    let sum = gamma_c + omega;

    // gamma theta t (Gamma - Omega) / k^2 with Gamma - Omega = -k^2 q / (Gamma + Omega)
    let q = Complex64::new(p * p, -p);
    let drift = -q * (g * params.theta * t) / sum;

    // (1 - e^{-Omega t}) / 2
    let half_decay = (Complex64::new(1.0, 0.0) - (-omega * t).exp()) * 0.5;

    // b - 1 = k^2 q (Gamma + Omega - 2 gamma) / (2 gamma Omega (Gamma + Omega))
    let b_minus_one = kq * (sum - 2.0 * g) / (omega * sum * (2.0 * g));
    let main_arg = b_minus_one * half_decay;
    if !(1.0 + main_arg.re > 0.0) {
        return Err(Error::BranchCut { frequency: p });
    }
    let main = -ln_1p(main_arg) * scale;

    // Gamma/Omega - 1 and gamma/Omega - 1, both as differences over Omega.
    let gamma_minus_omega = -kq / sum;
    let real_gamma_minus_omega = gamma_minus_omega - Complex64::new(0.0, params.rho * k * p);
    let ratio = -(ln_1p(real_gamma_minus_omega / omega * half_decay)
        - ln_1p(gamma_minus_omega / omega * half_decay))
        * scale;

    Ok(ExponentTerms {
        drift,
        ratio,
        main,
        omega,
    })
}

/// `F_t(p)` for a validated parameter set and an integer lag.
pub fn characteristic_exponent(
    params: &HestonParams,
    tau: TimeLag,
    p: f64,
    variant: FtVariant,
) -> Result<Complex64> {
    params.validate()?;
    if !p.is_finite() {
        return Err(crate::error::domain("p", p, "frequency must be finite"));
    }
    Ok(exponent_terms(params, tau.as_f64(), p)?.total(variant))
}

/// Tracks `Omega` along an ordered sweep of frequencies and flags jumps larger
/// than `|Omega|`, the signature of a crossed square-root branch cut.
///
/// The exponent is even in `Omega`, so a detected jump is reported rather than
/// patched by a sign flip: the log-space rewrite needs `Re(Omega) > 0`.
#[derive(Debug, Default, Clone)]
pub struct BranchMonitor {
    last: Option<Complex64>,
}

impl BranchMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, p: f64, omega: Complex64) -> Result<()> {
        if let Some(prev) = self.last {
            if (omega - prev).norm() > omega.norm() {
                return Err(Error::BranchCut { frequency: p });
            }
        }
        self.last = Some(omega);
        Ok(())
    }
}
