//! Full-truncation Euler scheme for the log-return and variance SDEs.

use alloc::vec::Vec;

use super::rng::{sim_counter, Philox4x32};
use crate::error::{domain, Error, Result};
use crate::params::HestonParams;

const STEP_STREAM: u32 = 0;
const BURN_IN_STREAM: u32 = 1;
const GAMMA_STREAM: u32 = 2;

/// How each path's starting variance is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitialVariance {
    Fixed(f64),
    /// Run the variance recursion alone for `steps` steps of size `dt`,
    /// starting from `theta`, and start the path from where it ends.
    Stationary { steps: u32, dt: f64 },
    /// Draw from the exact stationary law, Gamma with shape
    /// `2 gamma theta / k^2` and scale `k^2 / (2 gamma)`.
    StationaryExact,
}

impl InitialVariance {
    /// Burn-in long enough (`10 / gamma`) that the start is stationary to `e^{-20}`.
    pub fn stationary_for(params: &HestonParams, dt: f64) -> Self {
        let steps = (10.0 / (params.gamma * dt)).ceil().max(1.0);
        InitialVariance::Stationary {
            steps: steps.min(f64::from(u32::MAX)) as u32,
            dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub params: HestonParams,
    pub v0: InitialVariance,
    /// Step size in days.
    pub dt: f64,
    /// Horizon `t` in days.
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl SimConfig {
    /// Validates the configuration and returns the number of Euler steps.
    pub fn steps(&self) -> Result<u32> {
        self.params.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(domain("dt", self.dt, "must be > 0"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(domain("horizon", self.horizon, "must be > 0"));
        }
        let steps = (self.horizon / self.dt).round();
        if (steps * self.dt - self.horizon).abs() > 1e-9 * self.horizon || steps < 1.0 {
            return Err(domain("dt", self.dt, "horizon must be a whole number of steps"));
        }
        if steps > f64::from(u32::MAX) {
            return Err(domain("dt", self.dt, "too many steps"));
        }
        if self.n_paths == 0 {
            return Err(Error::Invalid("n_paths must be at least 1".into()));
        }
        match self.v0 {
            InitialVariance::Fixed(v) if !(v.is_finite() && v > 0.0) => {
                return Err(domain("v0", v, "must be > 0"))
            }
            InitialVariance::Stationary { dt, .. } if !(dt.is_finite() && dt > 0.0) => {
                return Err(domain("burn-in dt", dt, "must be > 0"))
            }
            _ => {}
        }
        Ok(steps as u32)
    }
}

/// Terminal state of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub x: f64,
    pub v: f64,
    /// Steps where the variance update went negative and was clamped to zero.
    pub clamps: u32,
}

/// Correlated pair `(xi_1, rho xi_1 + sqrt(1 - rho^2) xi_2)` for one step.
#[inline]
pub fn correlated_normals(gen: &Philox4x32, path: u64, step: u32, rho: f64) -> (f64, f64) {
    let (a, b) = gen.normals(sim_counter(path, step, STEP_STREAM));
    (a, rho * a + (1.0 - rho * rho).sqrt() * b)
}

#[inline]
fn variance_step(params: &HestonParams, v: f64, dt: f64, noise: f64) -> (f64, bool) {
    let vp = v.max(0.0);
    let next = v - params.gamma * (v - params.theta) * dt + params.k * (vp * dt).sqrt() * noise;
    if next < 0.0 {
        (0.0, true)
    } else {
        (next, false)
    }
}

fn burn_in(params: &HestonParams, gen: &Philox4x32, path: u64, steps: u32, dt: f64) -> (f64, u32) {
    let mut v = params.theta;
    let mut clamps = 0;
    for s in 0..steps {
        let (z, _) = gen.normals(sim_counter(path, s, BURN_IN_STREAM));
        let (next, clamped) = variance_step(params, v, dt, z);
        v = next;
        clamps += u32::from(clamped);
    }
    (v, clamps)
}

/// Marsaglia-Tsang gamma variate with unit scale, from path-keyed counters.
fn gamma_variate(gen: &Philox4x32, shape: f64, path: u64) -> f64 {
    let boosted = shape < 1.0;
    let a = if boosted { shape + 1.0 } else { shape };
    let d = a - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    let mut attempt = 0u32;
    let g = loop {
        let (z, _) = gen.normals(sim_counter(path, 2 * attempt, GAMMA_STREAM));
        let (u, _) = gen.uniforms(sim_counter(path, 2 * attempt + 1, GAMMA_STREAM));
        attempt += 1;
        let t = 1.0 + c * z;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        if u.ln() < 0.5 * z * z + d - d * v + d * v.ln() {
            break d * v;
        }
    };
    if boosted {
        let (u, _) = gen.uniforms(sim_counter(path, u32::MAX, GAMMA_STREAM));
        g * u.powf(1.0 / shape)
    } else {
        g
    }
}

fn stationary_exact(params: &HestonParams, gen: &Philox4x32, path: u64) -> f64 {
    let scale = params.k * params.k / (2.0 * params.gamma);
    gamma_variate(gen, params.feller_ratio(), path) * scale
}

fn euler_path(
    params: &HestonParams,
    v0: f64,
    dt: f64,
    steps: u32,
    mut noise: impl FnMut(u32) -> (f64, f64),
) -> PathOutcome {
    let mut x = 0.0;
    let mut v = v0;
    let mut clamps = 0;
    let sdt = dt.sqrt();
    for s in 0..steps {
        let (z1, zv) = noise(s);
        let vp = v.max(0.0);
        x += -0.5 * vp * dt + vp.sqrt() * sdt * z1;
        let (next, clamped) = variance_step(params, v, dt, zv);
        v = next;
        clamps += u32::from(clamped);
    }
    PathOutcome { x, v, clamps }
}

/// Simulates path number `path` of `cfg`; `steps` comes from [`SimConfig::steps`].
pub fn simulate_path(cfg: &SimConfig, steps: u32, path: u64) -> PathOutcome {
    let gen = Philox4x32::new(cfg.seed);
    let (v0, burn_clamps) = match cfg.v0 {
        InitialVariance::Fixed(v) => (v, 0),
        InitialVariance::Stationary { steps, dt } => burn_in(&cfg.params, &gen, path, steps, dt),
        InitialVariance::StationaryExact => (stationary_exact(&cfg.params, &gen, path), 0),
    };
    let rho = cfg.params.rho;
    let mut out = euler_path(&cfg.params, v0, cfg.dt, steps, |s| correlated_normals(&gen, path, s, rho));
    out.clamps += burn_clamps;
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Terminal centred log-returns, one per path.
    pub samples: Vec<f64>,
    pub clamp_count: u64,
}

/// Terminal centred log-returns `x_t` of `cfg.n_paths` independent paths.
pub fn simulate_returns(cfg: &SimConfig) -> Result<SimOutput> {
    let steps = cfg.steps()?;
    let mut samples = Vec::with_capacity(cfg.n_paths);
    let mut clamp_count = 0u64;
    for path in 0..cfg.n_paths as u64 {
        let out = simulate_path(cfg, steps, path);
        samples.push(out.x);
        clamp_count += u64::from(out.clamps);
    }
    Ok(SimOutput {
        samples,
        clamp_count,
    })
}

/// Draws from the variance recursion alone after `burn_in` steps of size `dt`.
pub fn stationary_variance_sample(
    params: &HestonParams,
    burn_in_steps: u32,
    dt: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(domain("dt", dt, "must be > 0"));
    }
    let gen = Philox4x32::new(seed);
    Ok((0..n as u64)
        .map(|path| burn_in(params, &gen, path, burn_in_steps, dt).0)
        .collect())
}

/// Exact draws from the stationary variance law.
pub fn stationary_exact_sample(params: &HestonParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let gen = Philox4x32::new(seed);
    Ok((0..n as u64).map(|path| stationary_exact(params, &gen, path)).collect())
}
