//! Monte Carlo simulation of the stochastic-variance model, used as an
//! independent check on the closed-form density.

pub mod rng;
pub mod sim;

pub use rng::{Philox4x32, StreamRng};
pub use sim::{
    correlated_normals, simulate_path, simulate_returns, stationary_exact_sample, stationary_variance_sample, InitialVariance,
    PathOutcome, SimConfig, SimOutput,
};
