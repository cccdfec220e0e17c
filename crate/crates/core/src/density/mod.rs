//! Candidate return densities: the Heston closed form, the normal baseline
//! and the shared CDF machinery.

pub mod dy;
pub mod exponent;
pub mod gaussian;
pub mod grid;
pub mod model;

pub use dy::{dy_cdf, dy_pdf, dy_pdf_many, dy_quantile, DyDistribution, QuadratureConfig};
pub use exponent::{characteristic_exponent, exponent_terms, BranchMonitor, ExponentTerms};
pub use gaussian::{gaussian_cdf, gaussian_pdf, gaussian_quantile, Gaussian};
pub use model::{DensityModel, Distribution, DyModel, ModelKind};
