//! Dataset preparation, model fitting and per-path testing.

use heston_gof_core::calibrate::{fit_dy, fit_gaussian, moment_guess, BinRule, DyFitConfig, EmpiricalPdf, FitReport};
use heston_gof_core::density::{DensityModel, Distribution, DyModel, ModelKind};
use heston_gof_core::gof::{
    aggregate_paths, chi2_pvalue, chi2_statistic, equal_freq_bins, ks_pvalue, ks_statistic, GofResult,
};
use heston_gof_core::market::{center_returns, overlapping_returns, path_returns, trim_returns, PriceSeries, TrimBounds};
use heston_gof_core::nn::{train_mlp, NnDensity, TrainConfig};
use heston_gof_core::{Error, FtVariant, HestonParams, Result, TimeLag};
use serde::{Deserialize, Serialize};

/// Returns prepared for one lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSeries {
    pub lag: TimeLag,
    pub returns: Vec<f64>,
    /// Returns dropped by trimming.
    pub trimmed: usize,
}

fn trim(series: Vec<f64>, tau: TimeLag) -> (Vec<f64>, usize) {
    match TrimBounds::for_lag(tau) {
        Some(bounds) => {
            let t = trim_returns(&series, bounds);
            (t.returns, t.removed)
        }
        None => (series, 0),
    }
}

/// Overlapping (or pooled non-overlapping) returns, optionally trimmed.
pub fn calibration_series(prices: &PriceSeries, tau: TimeLag, overlap: bool, trimmed: bool) -> Result<LagSeries> {
    let raw = if overlap {
        overlapping_returns(prices, tau)?
    } else {
        path_returns(prices, tau)?.into_iter().flat_map(|p| p.returns).collect()
    };
    let (returns, removed) = if trimmed { trim(raw, tau) } else { (raw, 0) };
    Ok(LagSeries {
        lag: tau,
        returns,
        trimmed: removed,
    })
}

/// Test datasets: the `tau` non-overlapping paths (or the single overlapping
/// series), each centred on its own mean.
pub fn test_paths(prices: &PriceSeries, tau: TimeLag, overlap: bool, trimmed: bool) -> Result<Vec<Vec<f64>>> {
    let raw: Vec<Vec<f64>> = if overlap {
        vec![overlapping_returns(prices, tau)?]
    } else {
        path_returns(prices, tau)?.into_iter().map(|p| p.returns).collect()
    };
    raw.into_iter()
        .map(|r| {
            let r = if trimmed { trim(r, tau).0 } else { r };
            center_returns(&r)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DyFitMode {
    /// One parameter set for every lag.
    Joint,
    /// A separate parameter set per lag.
    PerLag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyFitEntry {
    pub lags: Vec<TimeLag>,
    pub report: FitReport,
}

pub fn histograms(series: &[LagSeries]) -> Result<Vec<EmpiricalPdf>> {
    series
        .iter()
        .map(|s| EmpiricalPdf::from_sample(&s.returns, s.lag, BinRule::FreedmanDiaconis))
        .collect()
}

/// Calibrates the Heston density from histograms of each lag's returns.
pub fn fit_dy_series(series: &[LagSeries], mode: DyFitMode, cfg: &DyFitConfig) -> Result<Vec<DyFitEntry>> {
    let pdfs = histograms(series)?;
    let groups: Vec<Vec<usize>> = match mode {
        DyFitMode::Joint => vec![(0..pdfs.len()).collect()],
        DyFitMode::PerLag => (0..pdfs.len()).map(|i| vec![i]).collect(),
    };
    groups
        .into_iter()
        .map(|g| {
            let subset: Vec<EmpiricalPdf> = g.iter().map(|&i| pdfs[i].clone()).collect();
            let start = moment_guess(&subset)?;
            let report = fit_dy(&subset, &start, cfg)?;
            Ok(DyFitEntry {
                lags: subset.iter().map(|p| p.tau).collect(),
                report,
            })
        })
        .collect()
}

pub fn dy_params_for(entries: &[DyFitEntry], tau: TimeLag) -> Option<HestonParams> {
    entries.iter().find(|e| e.lags.contains(&tau)).map(|e| e.report.params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FitScope {
    /// Each path gets its own Gaussian / network.
    PerPath,
    /// One fit on all paths of the lag pooled together.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Ks,
    Chi2,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::Ks => "ks",
            TestKind::Chi2 => "chi2",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TestOptions {
    pub test: TestKind,
    pub per_bin: usize,
    pub scope: FitScope,
    pub variant: FtVariant,
    pub nn: TrainConfig,
}

/// The network trained on a sample's histogram, windowed on its range.
pub fn train_nn(sample: &[f64], tau: TimeLag, cfg: &TrainConfig) -> Result<NnDensity> {
    let pdf = EmpiricalPdf::from_sample(sample, tau, BinRule::FreedmanDiaconis)?;
    let report = train_mlp(&pdf, cfg)?;
    let (lo, hi) = sample
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    NnDensity::for_data_range(report.params, cfg.target, lo, hi)
}

/// Models to test each path of one lag against.
pub fn models_for_lag(
    kind: ModelKind,
    tau: TimeLag,
    paths: &[Vec<f64>],
    dy: Option<&HestonParams>,
    opts: &TestOptions,
) -> Result<Vec<DensityModel>> {
    let pooled = || paths.concat();
    let seeded = |i: usize| TrainConfig {
        seed: opts.nn.seed.wrapping_add(i as u64),
        ..opts.nn
    };
    match (kind, opts.scope) {
        (ModelKind::Gaussian, FitScope::PerPath) => paths.iter().map(|p| Ok(DensityModel::Gaussian(fit_gaussian(p)?))).collect(),
        (ModelKind::Gaussian, FitScope::Pooled) => {
            let g = fit_gaussian(&pooled())?;
            Ok(vec![DensityModel::Gaussian(g); paths.len()])
        }
        (ModelKind::Dy, _) => {
            let params = dy.ok_or_else(|| Error::Invalid(format!("no fitted Heston parameters for lag {tau}")))?;
            let m = DyModel::new(params, tau, opts.variant)?;
            Ok(vec![DensityModel::Dy(m); paths.len()])
        }
        (ModelKind::Nn, FitScope::PerPath) => paths
            .iter()
            .enumerate()
            .map(|(i, p)| Ok(DensityModel::Nn(train_nn(p, tau, &seeded(i))?)))
            .collect(),
        (ModelKind::Nn, FitScope::Pooled) => {
            let n = train_nn(&pooled(), tau, &seeded(0))?;
            Ok(vec![DensityModel::Nn(n); paths.len()])
        }
    }
}

/// Per-path statistics for one lag aggregated across paths.
///
/// Chi-square degrees of freedom use the smallest bin count over the paths.
pub fn test_lag(paths: &[Vec<f64>], models: &[DensityModel], opts: &TestOptions) -> Result<GofResult> {
    let mean_len = (paths.iter().map(Vec::len).sum::<usize>() as f64 / paths.len() as f64).round() as usize;
    match opts.test {
        TestKind::Ks => {
            let stats = paths
                .iter()
                .zip(models)
                .map(|(p, m)| ks_statistic(p, m))
                .collect::<Result<Vec<f64>>>()?;
            aggregate_paths(&stats, None, |z| ks_pvalue(z, mean_len))
        }
        TestKind::Chi2 => {
            let mut stats = Vec::with_capacity(paths.len());
            let mut min_bins = usize::MAX;
            for (p, m) in paths.iter().zip(models) {
                let partition = equal_freq_bins(m, p.len(), opts.per_bin)?;
                let (c, bins) = chi2_statistic(p, &partition);
                stats.push(c);
                min_bins = min_bins.min(bins);
            }
            let m = models[0].param_count();
            if min_bins < m + 2 {
                return Err(Error::InsufficientData {
                    needed: (m + 2) * opts.per_bin,
                    got: paths.iter().map(Vec::len).min().unwrap_or(0),
                });
            }
            let df = min_bins - 1 - m;
            aggregate_paths(&stats, Some(df), |c| chi2_pvalue(c, df))
        }
    }
}

/// Whether an error marks a row as not computable rather than failed.
pub fn is_skippable(e: &Error) -> bool {
    matches!(e, Error::InsufficientData { .. } | Error::Degenerate(_))
}
