//! Fourier inversion of the characteristic exponent.
//!
//! The density is `(1/pi) Int_0^inf Re[exp(i p x + F_t(p))] dp`. The integral is
//! truncated at the frequency where `|exp F_t| < 1e-16` and evaluated with the
//! trapezoid rule, halving the step (reusing every previous node) until
//! successive estimates agree. For this integrand the trapezoid error is pure
//! aliasing, `sum_{n != 0} P(x + 2 pi n / h)`, so it decays as fast as the tails.

use alloc::vec::Vec;
use num_complex::Complex64;

use super::exponent::{exponent_terms, BranchMonitor};
use super::grid::{invert_cdf, CdfTable};
use crate::error::{domain, Error, Result};
use crate::params::{FtVariant, HestonParams, TimeLag};

const PI: f64 = core::f64::consts::PI;

/// Tolerances for the inversion integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative change between successive step halvings that counts as converged.
    pub rel_tol: f64,
    /// Truncate the frequency axis once `|exp F_t(p)|` drops below this.
    pub cutoff: f64,
    /// Node budget; exceeding it is a convergence failure.
    pub max_nodes: usize,
    pub initial_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            cutoff: 1e-16,
            max_nodes: 1 << 21,
            initial_panels: 64,
        }
    }
}

/// The characteristic function sampled at `p_j = j h`, `j = 0..=n`.
#[derive(Debug, Clone)]
struct PhiGrid {
    step: f64,
    phi: Vec<Complex64>,
    omega: Vec<Complex64>,
}

struct Integrand<'a> {
    params: &'a HestonParams,
    t: f64,
    variant: FtVariant,
}

impl Integrand<'_> {
    fn eval(&self, p: f64) -> Result<(Complex64, Complex64)> {
        let terms = exponent_terms(self.params, self.t, p)?;
        Ok((terms.total(self.variant).exp(), terms.omega))
    }

    /// Doubles `p` from the natural scale `1/sqrt(theta t)` until the
    /// characteristic function is below `cutoff`.
    fn cutoff_frequency(&self, cutoff: f64) -> Result<f64> {
        let log_cut = cutoff.ln();
        let mut p = 1.0 / (self.params.theta * self.t).sqrt();
        for _ in 0..80 {
            let terms = exponent_terms(self.params, self.t, p)?;
            if terms.total(self.variant).re < log_cut {
                return Ok(p);
            }
            p *= 2.0;
        }
        Err(Error::Quadrature {
            nodes: 0,
            change: f64::INFINITY,
        })
    }

    fn initial_grid(&self, p_max: f64, panels: usize) -> Result<PhiGrid> {
        let step = p_max / panels as f64;
        let mut phi = Vec::with_capacity(panels + 1);
        let mut omega = Vec::with_capacity(panels + 1);
        for j in 0..=panels {
            let (v, o) = self.eval(step * j as f64)?;
            phi.push(v);
            omega.push(o);
        }
        let grid = PhiGrid { step, phi, omega };
        grid.check_branch()?;
        Ok(grid)
    }

    fn refine(&self, grid: &PhiGrid) -> Result<PhiGrid> {
        let step = 0.5 * grid.step;
        let n = grid.phi.len();
        let mut phi = Vec::with_capacity(2 * n - 1);
        let mut omega = Vec::with_capacity(2 * n - 1);
        for j in 0..n {
            phi.push(grid.phi[j]);
            omega.push(grid.omega[j]);
            if j + 1 < n {
                let (v, o) = self.eval(step * (2 * j + 1) as f64)?;
                phi.push(v);
                omega.push(o);
            }
        }
        let grid = PhiGrid { step, phi, omega };
        grid.check_branch()?;
        Ok(grid)
    }
}

impl PhiGrid {
    fn check_branch(&self) -> Result<()> {
        let mut monitor = BranchMonitor::new();
        for (j, &o) in self.omega.iter().enumerate() {
            monitor.observe(self.step * j as f64, o)?;
        }
        Ok(())
    }

    fn nodes(&self) -> usize {
        self.phi.len()
    }

    /// `h * sum |phi_j|`, an upper bound for `pi * max pdf`.
    fn l1(&self) -> f64 {
        self.step * self.phi.iter().map(|v| v.norm()).sum::<f64>()
    }

    /// Trapezoid sums for the density and for its integral from `origin`.
    fn sums(&self, x: f64, origin: Option<f64>) -> (f64, f64) {
        let h = self.step;
        let n = self.phi.len();
        let rot = Complex64::new((h * x).cos(), (h * x).sin());
        let (rot0, origin) = match origin {
            Some(o) => (Complex64::new((h * o).cos(), (h * o).sin()), o),
            None => (Complex64::new(1.0, 0.0), 0.0),
        };
        let mut w = Complex64::new(1.0, 0.0);
        let mut w0 = Complex64::new(1.0, 0.0);
        let mut dens = 0.5 * self.phi[0].re;
        let mut cum = 0.5 * (x - origin);
        for j in 1..n {
            if j % 64 == 0 {
                let a = h * j as f64;
                w = Complex64::new((a * x).cos(), (a * x).sin());
                w0 = Complex64::new((a * origin).cos(), (a * origin).sin());
            } else {
                w *= rot;
                w0 *= rot0;
            }
            let weight = if j + 1 == n { 0.5 } else { 1.0 };
            let v = self.phi[j];
            dens += weight * (v * w).re;
            cum += weight * (v * (w - w0)).im / (h * j as f64);
        }
        (dens * h / PI, cum * h / PI)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.sums(x, None).0
    }
}

fn converge(
    integrand: &Integrand<'_>,
    mut grid: PhiGrid,
    probes: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(PhiGrid, Vec<f64>)> {
    let mut prev: Vec<f64> = probes.iter().map(|&x| grid.pdf(x)).collect();
    loop {
        if 2 * grid.nodes() - 1 > cfg.max_nodes {
            let change = f64::NAN;
            return Err(Error::Quadrature {
                nodes: grid.nodes(),
                change,
            });
        }
        let next_grid = integrand.refine(&grid)?;
        let next: Vec<f64> = probes.iter().map(|&x| next_grid.pdf(x)).collect();
        let floor = 1e-4 * cfg.rel_tol * next_grid.l1() / PI;
        let mut worst = 0.0f64;
        let mut ok = true;
        for (a, b) in prev.iter().zip(next.iter()) {
            let diff = (a - b).abs();
            if diff > cfg.rel_tol * b.abs() + floor {
                ok = false;
            }
            worst = worst.max(diff);
        }
        grid = next_grid;
        prev = next;
        if ok {
            return Ok((grid, prev));
        }
        if grid.nodes() * 2 > cfg.max_nodes {
            return Err(Error::Quadrature {
                nodes: grid.nodes(),
                change: worst,
            });
        }
    }
}

fn validated(params: &HestonParams, x: &[f64]) -> Result<()> {
    params.validate()?;
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(domain("x", *bad, "return must be finite"));
    }
    Ok(())
}

/// Density of the centred log-return at each of `xs`, sharing one frequency grid.
pub fn dy_pdf_many(
    params: &HestonParams,
    tau: TimeLag,
    xs: &[f64],
    variant: FtVariant,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    validated(params, xs)?;
    let integrand = Integrand {
        params,
        t: tau.as_f64(),
        variant,
    };
    let p_max = integrand.cutoff_frequency(cfg.cutoff)?;
    let grid = integrand.initial_grid(p_max, cfg.initial_panels)?;
    Ok(converge(&integrand, grid, xs, cfg)?.1)
}

/// Density of the centred log-return `x` at lag `tau`.
pub fn dy_pdf(params: &HestonParams, tau: TimeLag, x: f64, variant: FtVariant) -> Result<f64> {
    Ok(dy_pdf_many(params, tau, &[x], variant, &QuadratureConfig::default())?[0])
}

/// Cumulative probability of the centred log-return, see [`DyDistribution::cdf`].
pub fn dy_cdf(params: &HestonParams, tau: TimeLag, x: f64, variant: FtVariant) -> Result<f64> {
    validated(params, &[x])?;
    Ok(DyDistribution::new(params, tau, variant)?.cdf(x))
}

/// Quantile of the centred log-return.
pub fn dy_quantile(params: &HestonParams, tau: TimeLag, q: f64, variant: FtVariant) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain("q", q, "quantile level must lie in (0, 1)"));
    }
    DyDistribution::new(params, tau, variant)?.quantile(q)
}

/// Mass allowed outside the CDF window on each side.
const WINDOW_TAIL_MASS: f64 = 1e-9;
/// `Phi^{-1}(1e-8)` in magnitude; the starting half-width in standard deviations.
const GAUSSIAN_EDGE: f64 = 5.612;
const PROBES: usize = 65;
const TABLE_POINTS: usize = 513;

/// A frozen inversion of the density for one parameter set and lag with a
/// cached CDF table; cheap to query repeatedly and safe to share.
///
/// The CDF integrates the density from the lower window edge `lo`, chosen so
/// that the mass below it is under `1e-9`; it is not renormalised.
#[derive(Debug, Clone)]
pub struct DyDistribution {
    params: HestonParams,
    tau: TimeLag,
    variant: FtVariant,
    grid: PhiGrid,
    lo: f64,
    hi: f64,
    tail_mass: (f64, f64),
    table: CdfTable,
}

fn tail_estimate(grid: &PhiGrid, edge: f64, inward: f64) -> f64 {
    let f0 = grid.pdf(edge);
    let f1 = grid.pdf(edge + inward);
    if f0 <= 0.0 {
        return 0.0;
    }
    if f1 <= f0 {
        return f64::INFINITY;
    }
    let rate = (f1 / f0).ln() / inward.abs();
    f0 / rate
}

impl DyDistribution {
    pub fn new(params: &HestonParams, tau: TimeLag, variant: FtVariant) -> Result<Self> {
        Self::with_config(params, tau, variant, &QuadratureConfig::default())
    }

    pub fn with_config(
        params: &HestonParams,
        tau: TimeLag,
        variant: FtVariant,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        params.validate()?;
        let t = tau.as_f64();
        let integrand = Integrand {
            params,
            t,
            variant,
        };
        let p_max = integrand.cutoff_frequency(cfg.cutoff)?;
        let mut grid = integrand.initial_grid(p_max, cfg.initial_panels)?;

        let centre = -0.5 * params.theta * t;
        let sd = (params.theta * t).sqrt();
        let mut below = GAUSSIAN_EDGE * sd;
        let mut above = GAUSSIAN_EDGE * sd;
        let mut tails = (f64::INFINITY, f64::INFINITY);
        for _ in 0..16 {
            let lo = centre - below;
            let hi = centre + above;
            let step = (hi - lo) / (PROBES - 1) as f64;
            let probes: Vec<f64> = (0..PROBES).map(|i| lo + step * i as f64).collect();
            grid = converge(&integrand, grid, &probes, cfg)?.0;
            tails = (tail_estimate(&grid, lo, step), tail_estimate(&grid, hi, -step));
            let mut done = true;
            if tails.0 > WINDOW_TAIL_MASS {
                below *= 2.0;
                done = false;
            }
            if tails.1 > WINDOW_TAIL_MASS {
                above *= 2.0;
                done = false;
            }
            if done {
                break;
            }
        }
        if !(tails.0 <= WINDOW_TAIL_MASS && tails.1 <= WINDOW_TAIL_MASS) {
            return Err(Error::Quadrature {
                nodes: grid.nodes(),
                change: tails.0.max(tails.1),
            });
        }
        let lo = centre - below;
        let hi = centre + above;
        let table = CdfTable::tabulate(lo, hi, TABLE_POINTS, |x| grid.sums(x, Some(lo)).1);
        Ok(Self {
            params: *params,
            tau,
            variant,
            grid,
            lo,
            hi,
            tail_mass: tails,
            table,
        })
    }

    pub fn params(&self) -> &HestonParams {
        &self.params
    }

    pub fn tau(&self) -> TimeLag {
        self.tau
    }

    pub fn variant(&self) -> FtVariant {
        self.variant
    }

    /// `[lo, hi]` outside of which the density is treated as zero.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Estimated mass below `lo` and above `hi`.
    pub fn tail_mass(&self) -> (f64, f64) {
        self.tail_mass
    }

    pub fn nodes(&self) -> usize {
        self.grid.nodes()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.grid.pdf(x)
    }

    /// Integral of the density from `lo` to `x`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        self.grid.sums(x, Some(self.lo)).1.clamp(0.0, 1.0)
    }

    /// Unclamped `cdf` together with the density.
    fn cdf_pdf(&self, x: f64) -> (f64, f64) {
        let (d, c) = self.grid.sums(x, Some(self.lo));
        (c, d)
    }

    /// Raw mass between the window edges (before clamping).
    pub fn window_mass(&self) -> f64 {
        self.grid.sums(self.hi, Some(self.lo)).1
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        let x = invert_cdf(&self.table, q, |x| self.cdf_pdf(x))?;
        Ok(x.clamp(self.lo, self.hi))
    }
}
