//! Shared CDF tabulation and inversion used by the tabulated densities.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

/// Monotone table of `(x, cdf(x))` pairs used to bracket quantiles.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl CdfTable {
    /// Tabulates `cdf` on `points` equally spaced nodes over `[lo, hi]`,
    /// enforcing monotonicity against round-off.
    pub fn tabulate(lo: f64, hi: f64, points: usize, mut cdf: impl FnMut(f64) -> f64) -> Self {
        let points = points.max(2);
        let step = (hi - lo) / (points - 1) as f64;
        let mut xs = Vec::with_capacity(points);
        let mut values = Vec::with_capacity(points);
        let mut running = 0.0f64;
        for i in 0..points {
            let x = if i + 1 == points { hi } else { lo + step * i as f64 };
            running = running.max(cdf(x).clamp(0.0, 1.0));
            xs.push(x);
            values.push(running);
        }
        Self { xs, cdf: values }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    /// Bracketing interval `[x_i, x_{i+1}]` with `cdf(x_i) <= q <= cdf(x_{i+1})`.
    fn bracket(&self, q: f64) -> (f64, f64, f64, f64) {
        let n = self.xs.len();
        let i = self.cdf.partition_point(|&c| c < q).clamp(1, n - 1);
        (self.xs[i - 1], self.cdf[i - 1], self.xs[i], self.cdf[i])
    }
}

/// Solves `cdf(x) = q` inside the table window by safeguarded Newton steps.
///
/// `eval` returns `(cdf(x), pdf(x))`. Probabilities beyond the tabulated
/// range map to the window edges.
pub fn invert_cdf(table: &CdfTable, q: f64, mut eval: impl FnMut(f64) -> (f64, f64)) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain("q", q, "quantile level must lie in (0, 1)"));
    }
    let values = table.values();
    if q <= values[0] {
        return Ok(table.xs()[0]);
    }
    if q >= values[values.len() - 1] {
        return Ok(table.xs()[values.len() - 1]);
    }
    let (mut a, mut fa, mut b, mut fb) = table.bracket(q);
    let mut x = if fb > fa { a + (q - fa) / (fb - fa) * (b - a) } else { 0.5 * (a + b) };
    for _ in 0..200 {
        let (f, density) = eval(x);
        let err = f - q;
        if err.abs() <= 1e-12 {
            return Ok(x);
        }
        if err < 0.0 {
            a = x;
            fa = f;
        } else {
            b = x;
            fb = f;
        }
        if b - a <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            return Ok(x);
        }
        let newton = if density > 0.0 { x - err / density } else { f64::NAN };
        x = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
    }
    let _ = (fa, fb);
    Err(Error::Invalid(alloc::format!("quantile search for q = {q} did not converge")))
}

/// Nodes and weights of the 8-point Gauss-Legendre rule on `[-1, 1]`.
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * (f(mid - half * node) + f(mid + half * node));
    }
    acc * half
}
