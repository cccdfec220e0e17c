//! Full-batch gradient descent on squared error with an adaptive step.

use alloc::vec::Vec;

use super::mlp::{MlpParams, DEFAULT_REPORTED_PARAMS, STORED_PARAMS};
use crate::calibrate::EmpiricalPdf;
use crate::error::{Error, Result};

/// Populated bins needed to train, one per stored parameter.
pub const MIN_TRAINING_BINS: usize = STORED_PARAMS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum NnTarget {
    /// Network output approximates `ln P*`.
    #[default]
    LogDensity,
    /// Network output approximates `P*` itself.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    pub target: NnTarget,
    pub initial_step: f64,
    /// Converged once the gradient norm of the standardised loss falls below this.
    pub gradient_tol: f64,
    pub reported_param_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50_000,
            seed: 0,
            target: NnTarget::default(),
            initial_step: 0.05,
            gradient_tol: 1e-10,
            reported_param_count: DEFAULT_REPORTED_PARAMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainReport {
    pub params: MlpParams,
    /// Mean squared error in the original target units.
    pub mse: f64,
    pub epochs: usize,
    pub converged: bool,
    /// Training loss every 100 epochs and at the end.
    pub loss_trace: Vec<f64>,
}

fn loss_and_gradient(p: &MlpParams, xs: &[f64], ys: &[f64]) -> (f64, [f64; STORED_PARAMS]) {
    let mut loss = 0.0;
    let mut grad = [0.0; STORED_PARAMS];
    let n = xs.len() as f64;
    for (&x, &y) in xs.iter().zip(ys) {
        let (f, g) = p.forward_with_gradient(x);
        let r = f - y;
        loss += r * r;
        for (acc, gi) in grad.iter_mut().zip(g) {
            *acc += 2.0 * r * gi / n;
        }
    }
    (loss / n, grad)
}

fn loss_only(p: &MlpParams, xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(&x, &y)| (p.forward(x) - y).powi(2)).sum::<f64>() / xs.len() as f64
}

fn standardise(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let s = (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt();
    (m, if s > 0.0 { s } else { 1.0 })
}

/// Fits the network to `(xs, ys)` by gradient descent.
///
/// Inputs and targets are standardised during training and the scaling is
/// folded back into the returned weights. A step that raises the loss is
/// rejected and the step halved; an accepted step grows it by 10%.
pub fn train_on(xs: &[f64], ys: &[f64], cfg: &TrainConfig) -> Result<TrainReport> {
    if xs.len() != ys.len() {
        return Err(Error::Invalid("inputs and targets differ in length".into()));
    }
    if xs.len() < MIN_TRAINING_BINS {
        return Err(Error::InsufficientData {
            needed: MIN_TRAINING_BINS,
            got: xs.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("training data must be finite".into()));
    }
    let (mx, sx) = standardise(xs);
    let (my, sy) = standardise(ys);
    let zx: Vec<f64> = xs.iter().map(|x| (x - mx) / sx).collect();
    let zy: Vec<f64> = ys.iter().map(|y| (y - my) / sy).collect();

    let mut params = MlpParams::seeded(cfg.seed);
    let (mut loss, mut grad) = loss_and_gradient(&params, &zx, &zy);
    let mut step = cfg.initial_step;
    let mut trace = alloc::vec![loss];
    let mut converged = false;
    let mut epochs = 0;
    while epochs < cfg.epochs {
        epochs += 1;
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm <= cfg.gradient_tol {
            converged = true;
            break;
        }
        let mut v = params.to_vec();
        for (vi, gi) in v.iter_mut().zip(grad) {
            *vi -= step * gi;
        }
        let candidate = MlpParams::from_vec(&v, params.reported_param_count);
        let (trial, trial_grad) = loss_and_gradient(&candidate, &zx, &zy);
        if trial <= loss {
            params = candidate;
            loss = trial;
            grad = trial_grad;
            step *= 1.1;
        } else {
            step *= 0.5;
            if step < 1e-300 {
                break;
            }
        }
        if epochs % 100 == 0 {
            trace.push(loss);
        }
    }
    trace.push(loss);

    let folded = params.fold_affine(mx, sx, my, sy);
    let params = MlpParams {
        reported_param_count: cfg.reported_param_count,
        ..folded
    };
    Ok(TrainReport {
        mse: loss_only(&params, xs, ys),
        params,
        epochs,
        converged,
        loss_trace: trace,
    })
}

/// Trains on the populated bins of a histogram.
pub fn train_mlp(pdf: &EmpiricalPdf, cfg: &TrainConfig) -> Result<TrainReport> {
    let (xs, ps): (Vec<f64>, Vec<f64>) = pdf.populated().unzip();
    let ys: Vec<f64> = match cfg.target {
        NnTarget::LogDensity => ps.iter().map(|p| p.ln()).collect(),
        NnTarget::Density => ps,
    };
    train_on(&xs, &ys, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::BinRule;
    use crate::params::TimeLag;

    #[test]
    fn realizable_target() {
        let teacher = MlpParams::seeded(123);
        let xs: Vec<f64> = (0..80).map(|i| -3.0 + 0.075 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| teacher.forward(x)).collect();
        let r = train_on(&xs, &ys, &TrainConfig { epochs: 200_000, seed: 5, ..Default::default() }).unwrap();
        assert!(r.mse < 1e-6, "{}", r.mse);
    }

    #[test]
    fn beats_best_parabola_on_gaussian_log_density() {
        let mut rng = crate::mc::StreamRng::new(31, 0);
        let draws: Vec<f64> = (0..20_000).map(|_| rng.normal()).collect();
        let h = EmpiricalPdf::from_sample(&draws, TimeLag::new(1).unwrap(), BinRule::default()).unwrap();
        let (xs, ps): (Vec<f64>, Vec<f64>) = h.populated().unzip();
        let ys: Vec<f64> = ps.iter().map(|p| p.ln()).collect();
        let r = train_mlp(&h, &TrainConfig::default()).unwrap();
        let parabola = least_squares_parabola_mse(&xs, &ys);
        assert!(r.mse < parabola, "{} vs {parabola}", r.mse);
    }

    fn least_squares_parabola_mse(xs: &[f64], ys: &[f64]) -> f64 {
        // normal equations for y = a + b x + c x^2
        let mut m = [[0.0f64; 4]; 3];
        for (&x, &y) in xs.iter().zip(ys) {
            let basis = [1.0, x, x * x];
            for r in 0..3 {
                for c in 0..3 {
                    m[r][c] += basis[r] * basis[c];
                }
                m[r][3] += basis[r] * y;
            }
        }
        for col in 0..3 {
            let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
            m.swap(col, piv);
            for r in 0..3 {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for c in col..4 {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
        let coef = [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]];
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| (coef[0] + coef[1] * x + coef[2] * x * x - y).powi(2))
            .sum::<f64>()
            / xs.len() as f64
    }

    #[test]
    fn gaussian_log_density_parabola_oracle() {
        // a parabola fits ln phi exactly; the network still has to get close
        let xs: Vec<f64> = (0..60).map(|i| -3.0 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| -0.5 * x * x - 0.918_938_533_204_672_7).collect();
        assert!(least_squares_parabola_mse(&xs, &ys) < 1e-20);
        let r = train_on(&xs, &ys, &TrainConfig::default()).unwrap();
        assert!(r.mse < 1e-4, "{}", r.mse);
    }

    #[test]
    fn trace_non_increasing_and_deterministic() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
        let cfg = TrainConfig { epochs: 3000, seed: 9, ..Default::default() };
        let a = train_on(&xs, &ys, &cfg).unwrap();
        let b = train_on(&xs, &ys, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.loss_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.params.reported_param_count, 11);
    }

    #[test]
    fn too_few_bins() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let h = EmpiricalPdf::from_sample(&xs, TimeLag::new(1).unwrap(), BinRule::Count(10)).unwrap();
        assert!(matches!(train_mlp(&h, &TrainConfig::default()), Err(Error::InsufficientData { .. })));
    }
}
