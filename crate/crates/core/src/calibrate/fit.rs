//! Parameter fitting for the Gaussian baseline and the Heston density.

use alloc::vec::Vec;

use super::histogram::EmpiricalPdf;
use super::objective::{objective_with, Loss};
use super::simplex::{nelder_mead, SimplexConfig};
use crate::density::{dy_pdf_many, Gaussian, QuadratureConfig};
use crate::error::{Error, Result};
use crate::market::mean;
use crate::mc::StreamRng;
use crate::params::{FtVariant, HestonParams};

/// Maximum-likelihood normal: sample mean and population standard deviation.
pub fn fit_gaussian(series: &[f64]) -> Result<Gaussian> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: series.len(),
        });
    }
    let m = mean(series);
    let var = series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / series.len() as f64;
    if !(var > 0.0) {
        return Err(Error::Degenerate("sample variance is zero"));
    }
    Gaussian::new(m, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyFitConfig {
    pub loss: Loss,
    pub variant: FtVariant,
    pub quadrature: QuadratureConfig,
    pub simplex: SimplexConfig,
    /// Stop after two consecutive restarts improving by less than this, relatively.
    pub restart_tol: f64,
    pub max_restarts: usize,
    /// Seed for the restart simplex perturbations.
    pub seed: u64,
}

impl Default for DyFitConfig {
    fn default() -> Self {
        Self {
            loss: Loss::default(),
            variant: FtVariant::default(),
            quadrature: QuadratureConfig::default(),
            simplex: SimplexConfig::default(),
            restart_tol: 1e-4,
            max_restarts: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitReport {
    pub params: HestonParams,
    pub objective: f64,
    pub evaluated_bins: usize,
    pub skipped_bins: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// Best objective after each simplex iteration, across restarts.
    pub trace: Vec<f64>,
}

/// Start point from histogram moments: variance per unit time for `theta`,
/// a reversion time at the geometric mean lag and a Feller ratio of 1.5.
pub fn moment_guess(pdfs: &[EmpiricalPdf]) -> Result<HestonParams> {
    if pdfs.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let n = pdfs.len() as f64;
    let mut theta = 0.0;
    let mut drift = 0.0;
    let mut log_lag = 0.0;
    for pdf in pdfs {
        let (m, v) = pdf.moments();
        let t = pdf.tau.as_f64();
        theta += v / t / n;
        drift += m / t / n;
        log_lag += t.ln() / n;
    }
    let gamma = (-log_lag).exp();
    let k = (2.0 * gamma * theta / 1.5).sqrt();
    HestonParams::new(gamma, theta, k, drift + 0.5 * theta, 0.0)
}

/// Heston objective at `params` over every histogram.
pub fn dy_objective(params: &HestonParams, pdfs: &[EmpiricalPdf], cfg: &DyFitConfig) -> Result<super::ObjectiveValue> {
    objective_with(pdfs, cfg.loss, |i, xs| {
        let tau = pdfs[i].tau;
        let shift = params.mu * tau.as_f64();
        let centred: Vec<f64> = xs.iter().map(|x| x - shift).collect();
        dy_pdf_many(params, tau, &centred, cfg.variant, &cfg.quadrature)
    })
}

/// Joint fit of `(gamma, theta, k, mu)` to all histograms, `rho` held at `initial.rho`.
///
/// The search runs over `(ln gamma, ln theta, ln k, mu / theta_0)`. Points
/// where the density cannot be evaluated score `+inf`.
pub fn fit_dy(pdfs: &[EmpiricalPdf], initial: &HestonParams, cfg: &DyFitConfig) -> Result<FitReport> {
    initial.validate()?;
    if pdfs.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mu_scale = initial.theta;
    let rho = initial.rho;
    let decode = |z: &[f64]| HestonParams::new(z[0].exp(), z[1].exp(), z[2].exp(), z[3] * mu_scale, rho);
    let score = |z: &[f64]| -> f64 {
        match decode(z).and_then(|p| dy_objective(&p, pdfs, cfg)) {
            Ok(v) => v.value,
            Err(_) => f64::INFINITY,
        }
    };

    let base_steps = [0.2, 0.2, 0.2, 0.5];
    let mut best_z = alloc::vec![initial.gamma.ln(), initial.theta.ln(), initial.k.ln(), initial.mu / mu_scale];
    let mut best = score(&best_z);
    let mut trace = alloc::vec![best];
    let mut evaluations = 1;
    let mut rng = StreamRng::new(cfg.seed, 0x5ee_d);

    let mut restarts = 0;
    let mut quiet = 0;
    let mut last_converged;
    let mut steps = base_steps;
    loop {
        let run = nelder_mead(score, &best_z, &steps, &cfg.simplex);
        evaluations += run.evaluations;
        last_converged = run.converged;
        let previous = best;
        if run.value < best {
            best = run.value;
            best_z = run.x;
        }
        trace.extend(run.trace.iter().map(|&v| v.min(previous)));
        let rel = if previous.is_finite() && previous > 0.0 {
            (previous - best) / previous
        } else if previous == best {
            0.0
        } else {
            1.0
        };
        if restarts > 0 && rel < cfg.restart_tol {
            quiet += 1;
        } else if restarts > 0 {
            quiet = 0;
        }
        if quiet >= 2 || restarts >= cfg.max_restarts {
            break;
        }
        restarts += 1;
        for (s, b) in steps.iter_mut().zip(base_steps) {
            let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            *s = sign * b * (0.25 + 0.75 * rng.uniform());
        }
    }
    // best-so-far running minimum
    for i in 1..trace.len() {
        trace[i] = trace[i].min(trace[i - 1]);
    }

    let params = decode(&best_z)?;
    let obj = dy_objective(&params, pdfs, cfg)?;
    Ok(FitReport {
        params,
        objective: obj.value,
        evaluated_bins: obj.evaluated,
        skipped_bins: obj.skipped,
        evaluations,
        restarts,
        converged: last_converged && quiet >= 2,
        trace,
    })
}
