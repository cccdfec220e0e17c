//! Nelder-Mead simplex minimisation.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexConfig {
    pub max_evaluations: usize,
    /// Stop when the spread of vertex values falls below `f_tol (1 + |f_best|)`.
    pub f_tol: f64,
    /// Stop when every vertex lies within this distance of the best, per coordinate.
    pub x_tol: f64,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            max_evaluations: 2000,
            f_tol: 1e-12,
            x_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

/// Minimises `f` from an initial simplex spanned by `x0` and `x0 + step_i e_i`.
///
/// A `NaN` value is treated as `+inf`.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], steps: &[f64], cfg: &SimplexConfig) -> SimplexResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    let mut trace = Vec::new();
    let mut converged = false;

    while evals < cfg.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);

        let f_spread = vals[n] - vals[0];
        let x_spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if vals[0].is_finite() && f_spread <= cfg.f_tol * (1.0 + vals[0].abs()) && x_spread <= cfg.x_tol {
            converged = true;
            break;
        }

        let mut centroid = alloc::vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (w - c)).collect() };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let xc = if fr < vals[n] { along(-0.5) } else { along(0.5) };
        let fc = eval(&xc, &mut evals);
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, p)| b + 0.5 * (p - b)).collect();
            vals[i] = eval(&shrunk, &mut evals);
            pts[i] = shrunk;
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        evaluations: evals,
        converged,
        trace,
    }
}
