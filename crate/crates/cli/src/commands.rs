//! Subcommand arguments and drivers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heston_gof_core::calibrate::{fit_gaussian, DyFitConfig, Loss, SimplexConfig};
use heston_gof_core::density::{gaussian_pdf, dy_pdf_many, Distribution, ModelKind, QuadratureConfig};
use heston_gof_core::market::{excess_kurtosis, mean, overlapping_returns, trim_returns, variance, TrimBounds};
use heston_gof_core::mc::{simulate_returns, InitialVariance, SimConfig};
use heston_gof_core::nn::{NnTarget, TrainConfig, DEFAULT_REPORTED_PARAMS, STORED_PARAMS};
use heston_gof_core::{FtVariant, HestonParams, TimeLag};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::{ensure_dir, read_json, read_prices, write_json, write_text};
use crate::pipeline::{
    calibration_series, dy_params_for, fit_dy_series, is_skippable, models_for_lag, test_lag, test_paths, DyFitEntry,
    DyFitMode, FitScope, LagSeries, TestKind, TestOptions,
};
use crate::report::{render_kurtosis, render_test, GofRow, KurtosisRow, ModelTable, TestReport};

pub const DEFAULT_LAGS: [u32; 8] = [1, 5, 20, 40, 80, 100, 200, 250];
/// Vertical offset factor between successive lags in the stacked density plot.
pub const STACKING_FACTOR: f64 = 10.0;

#[derive(Debug, Parser)]
#[command(name = "heston-gof", version, about = "Heston return-density calibration and goodness-of-fit tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the Heston and Gaussian densities to overlapping, trimmed returns and write plot data.
    Replicate(ReplicateArgs),
    /// Run KS or chi-square tests on non-overlapping return paths.
    Test(TestArgs),
    /// Simulate terminal centred log-returns by Euler stepping.
    Simulate(SimulateArgs),
    /// Excess kurtosis of overlapping returns with and without trimming.
    Kurtosis(KurtosisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    ThreeTerm,
    OneTerm,
}

impl From<VariantArg> for FtVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::ThreeTerm => FtVariant::ThreeTerm,
            VariantArg::OneTerm => FtVariant::OneTerm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Abs,
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Gaussian,
    Dy,
    Nn,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Gaussian => ModelKind::Gaussian,
            ModelArg::Dy => ModelKind::Dy,
            ModelArg::Nn => ModelKind::Nn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NnTargetArg {
    LogDensity,
    Density,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Price file with `date,close` rows.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated time lags in trading days.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LAGS)]
    pub lags: Vec<u32>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Drop returns outside the tabulated per-lag bounds.
    #[arg(long, overrides_with = "no_trim")]
    pub trim: bool,
    #[arg(long)]
    pub no_trim: bool,
    /// Use the overlapping return series.
    #[arg(long, overrides_with = "no_overlap")]
    pub overlap: bool,
    #[arg(long)]
    pub no_overlap: bool,
}

impl PreprocessArgs {
    fn resolve(&self, default_trim: bool, default_overlap: bool) -> (bool, bool) {
        let pick = |on: bool, off: bool, default: bool| if on { true } else if off { false } else { default };
        (pick(self.trim, self.no_trim, default_trim), pick(self.overlap, self.no_overlap, default_overlap))
    }
}

#[derive(Debug, Args)]
pub struct DyArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::ThreeTerm)]
    pub ft_variant: VariantArg,
    /// Deviation measure in the fit objective.
    #[arg(long, value_enum, default_value_t = LossArg::Abs)]
    pub loss: LossArg,
    #[arg(long, value_enum, default_value_t = DyFitMode::Joint)]
    pub dy_fit: DyFitMode,
    /// Objective evaluations per simplex restart.
    #[arg(long, default_value_t = 2000)]
    pub max_evals: usize,
    /// Reuse Heston parameters from a fit JSON written by `replicate` or `test`.
    #[arg(long)]
    pub fit: Option<PathBuf>,
}

impl DyArgs {
    fn config(&self, seed: u64) -> DyFitConfig {
        DyFitConfig {
            loss: match self.loss {
                LossArg::Abs => Loss::AbsoluteLog,
                LossArg::Squared => Loss::SquaredLog,
            },
            variant: self.ft_variant.into(),
            quadrature: QuadratureConfig::default(),
            simplex: SimplexConfig {
                max_evaluations: self.max_evals,
                ..SimplexConfig::default()
            },
            seed,
            ..DyFitConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub pre: PreprocessArgs,
    #[command(flatten)]
    pub dy: DyArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub pre: PreprocessArgs,
    #[command(flatten)]
    pub dy: DyArgs,
    #[arg(long, value_enum, default_value_t = TestKind::Ks)]
    pub test: TestKind,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelArg::Gaussian, ModelArg::Dy, ModelArg::Nn])]
    pub models: Vec<ModelArg>,
    /// Expected observations per chi-square bin.
    #[arg(long, default_value_t = 5)]
    pub per_bin: usize,
    #[arg(long, value_enum, default_value_t = FitScope::PerPath)]
    pub fit_scope: FitScope,
    #[arg(long, default_value_t = 50_000)]
    pub nn_epochs: usize,
    /// Parameter count the network is charged in chi-square degrees of freedom.
    #[arg(long, default_value_t = DEFAULT_REPORTED_PARAMS)]
    pub nn_param_count: usize,
    /// Charge the network its full stored parameter count instead.
    #[arg(long)]
    pub nn_true_count: bool,
    #[arg(long, value_enum, default_value_t = NnTargetArg::LogDensity)]
    pub nn_target: NnTargetArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rho: f64,
    /// Initial variance: a number, `stationary` for exact draws from the
    /// stationary law, or `burn-in` to run the variance recursion for `10 / gamma` first.
    #[arg(long, default_value = "stationary")]
    pub v0: String,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KurtosisArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LAGS)]
    pub lags: Vec<u32>,
    /// Also write the table as JSON into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_lags(lags: &[u32]) -> CliResult<Vec<TimeLag>> {
    if lags.is_empty() {
        return Err(CliError::Usage("the lag set must not be empty".into()));
    }
    lags.iter()
        .map(|&l| TimeLag::new(l).map_err(|_| CliError::Usage(format!("lag {l} must be a positive integer"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianEntry {
    pub lag: TimeLag,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stacking {
    /// Lag `i` in ascending order is drawn scaled by `factor^i`.
    pub factor: f64,
    pub order: Vec<TimeLag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitFile {
    pub trim: bool,
    pub overlap: bool,
    pub dy: Vec<DyFitEntry>,
    #[serde(default)]
    pub gaussian: Vec<GaussianEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stacking: Option<Stacking>,
}

fn dy_fits(series: &[LagSeries], args: &DyArgs, seed: u64) -> CliResult<Vec<DyFitEntry>> {
    match &args.fit {
        Some(path) => {
            let file: FitFile = read_json(path)?;
            for s in series {
                if dy_params_for(&file.dy, s.lag).is_none() {
                    return Err(CliError::InvalidData {
                        path: path.clone(),
                        message: format!("no Heston parameters for lag {}", s.lag),
                    });
                }
            }
            Ok(file.dy)
        }
        None => Ok(fit_dy_series(series, args.dy_fit, &args.config(seed))?),
    }
}

pub fn replicate(args: &ReplicateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let lags = parse_lags(&args.data.lags)?;
    let prices = read_prices(&args.data.input)?;
    let (trim, overlap) = args.pre.resolve(true, true);
    let series = lags
        .iter()
        .map(|&tau| calibration_series(&prices, tau, overlap, trim))
        .collect::<heston_gof_core::Result<Vec<_>>>()?;
    let pdfs = crate::pipeline::histograms(&series)?;
    let dy = dy_fits(&series, &args.dy, args.data.seed)?;
    let variant: FtVariant = args.dy.ft_variant.into();
    ensure_dir(&args.data.out)?;

    let mut gaussians = Vec::new();
    let mut summary = format!("{:>6} {:>8} {:>8} {:>12} {:>12}\n", "lag", "N", "trimmed", "mean", "std");
    for (s, pdf) in series.iter().zip(&pdfs) {
        let g = fit_gaussian(&s.returns)?;
        let params = dy_params_for(&dy, s.lag).expect("every lag has a fit");
        let shift = params.mu * s.lag.as_f64();
        let centred: Vec<f64> = pdf.centers.iter().map(|x| x - shift).collect();
        let dy_density = dy_pdf_many(&params, s.lag, &centred, variant, &QuadratureConfig::default())?;
        let mut tsv = String::from("x\tempirical\tdy\tgaussian\n");
        for (i, &x) in pdf.centers.iter().enumerate() {
            let _ = writeln!(tsv, "{x:.8e}\t{:.8e}\t{:.8e}\t{:.8e}", pdf.densities[i], dy_density[i], gaussian_pdf_at(&g, x));
        }
        write_text(&args.data.out.join(format!("density_lag{}.tsv", s.lag.days())), &tsv)?;
        let _ = writeln!(summary, "{:>6} {:>8} {:>8} {:>12.4e} {:>12.4e}", s.lag.days(), s.returns.len(), s.trimmed, g.mean(), g.std());
        gaussians.push(GaussianEntry {
            lag: s.lag,
            mean: g.mean(),
            std: g.std(),
        });
    }
    for entry in &dy {
        let p = entry.report.params;
        let lags: Vec<String> = entry.lags.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(
            summary,
            "Heston fit (lags {}): gamma={:.4e} theta={:.4e} k={:.4e} mu={:.4e} E={:.4} converged={}",
            lags.join(","),
            p.gamma,
            p.theta,
            p.k,
            p.mu,
            entry.report.objective,
            entry.report.converged
        );
    }
    let mut order = lags.clone();
    order.sort();
    let file = FitFile {
        trim,
        overlap,
        dy,
        gaussian: gaussians,
        stacking: Some(Stacking {
            factor: STACKING_FACTOR,
            order,
        }),
    };
    write_json(&args.data.out.join("replicate_fit.json"), &file)?;
    stdout.write_all(summary.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn gaussian_pdf_at(g: &heston_gof_core::density::Gaussian, x: f64) -> f64 {
    gaussian_pdf(g.mean(), g.std(), x).unwrap_or(0.0)
}

pub fn test(args: &TestArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let lags = parse_lags(&args.data.lags)?;
    if args.models.is_empty() {
        return Err(CliError::Usage("the model set must not be empty".into()));
    }
    if args.per_bin == 0 {
        return Err(CliError::Usage("--per-bin must be at least 1".into()));
    }
    let prices = read_prices(&args.data.input)?;
    let (trim, overlap) = args.pre.resolve(false, false);
    let kinds: Vec<ModelKind> = args.models.iter().map(|&m| m.into()).collect();

    let paths_by_lag = lags
        .iter()
        .map(|&tau| test_paths(&prices, tau, overlap, trim))
        .collect::<heston_gof_core::Result<Vec<_>>>()?;

    let dy = if kinds.contains(&ModelKind::Dy) {
        let pooled: Vec<LagSeries> = lags
            .iter()
            .zip(&paths_by_lag)
            .map(|(&lag, paths)| LagSeries {
                lag,
                returns: paths.concat(),
                trimmed: 0,
            })
            .collect();
        dy_fits(&pooled, &args.dy, args.data.seed)?
    } else {
        Vec::new()
    };

    let opts = TestOptions {
        test: args.test,
        per_bin: args.per_bin,
        scope: args.fit_scope,
        variant: args.dy.ft_variant.into(),
        nn: TrainConfig {
            epochs: args.nn_epochs,
            seed: args.data.seed,
            target: match args.nn_target {
                NnTargetArg::LogDensity => NnTarget::LogDensity,
                NnTargetArg::Density => NnTarget::Density,
            },
            reported_param_count: if args.nn_true_count { STORED_PARAMS } else { args.nn_param_count },
            ..TrainConfig::default()
        },
    };

    let mut tables = Vec::new();
    for &kind in &kinds {
        let mut rows = Vec::new();
        let mut param_count = match kind {
            ModelKind::Gaussian => 2,
            ModelKind::Dy => 4,
            ModelKind::Nn => opts.nn.reported_param_count,
        };
        for (&tau, paths) in lags.iter().zip(&paths_by_lag) {
            let mean_path_len = paths.iter().map(Vec::len).sum::<usize>() as f64 / paths.len() as f64;
            let outcome = match models_for_lag(kind, tau, paths, dy_params_for(&dy, tau).as_ref(), &opts) {
                Ok(models) => {
                    param_count = models[0].param_count();
                    test_lag(paths, &models, &opts).map_err(|e| (e, false))
                }
                Err(e) => Err((e, true)),
            };
            let (result, skipped) = match outcome {
                Ok(r) => (Some(r), None),
                Err((e, true)) if is_skippable(&e) => (None, Some(format!("model not fitted: {e}"))),
                Err((e, false)) if is_skippable(&e) => (None, Some(skip_reason(args.test, &e, args.per_bin))),
                Err((e, _)) => return Err(e.into()),
            };
            rows.push(GofRow {
                lag: tau,
                paths: paths.len(),
                mean_path_len,
                result,
                skipped,
            });
        }
        tables.push(ModelTable {
            model: kind,
            param_count,
            rows,
        });
    }
    let report = TestReport {
        test: args.test.name().to_string(),
        per_bin: args.per_bin,
        tables,
    };
    let text = render_test(&report);
    ensure_dir(&args.data.out)?;
    let stem = format!("test_{}", args.test.name());
    write_json(&args.data.out.join(format!("{stem}.json")), &report)?;
    write_text(&args.data.out.join(format!("{stem}.txt")), &text)?;
    if !dy.is_empty() {
        let fit = FitFile {
            trim,
            overlap,
            dy,
            gaussian: Vec::new(),
            stacking: None,
        };
        write_json(&args.data.out.join("test_fit.json"), &fit)?;
    }
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn skip_reason(test: TestKind, e: &heston_gof_core::Error, per_bin: usize) -> String {
    match (test, e) {
        (TestKind::Chi2, heston_gof_core::Error::InsufficientData { got, .. }) => format!(
            "shortest path ({got} returns) gives too few bins at {per_bin} per bin (minimum {} bins, at least one degree of freedom)",
            heston_gof_core::gof::MIN_BINS
        ),
        _ => e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub params: HestonParams,
    pub v0: String,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub excess_kurtosis: f64,
    pub clamp_count: u64,
}

pub fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let params = HestonParams::new(args.gamma, args.theta, args.k, 0.0, args.rho)?;
    let v0 = if args.v0 == "stationary" {
        InitialVariance::StationaryExact
    } else if args.v0 == "burn-in" {
        InitialVariance::stationary_for(&params, args.dt)
    } else {
        let v: f64 = args
            .v0
            .parse()
            .map_err(|_| CliError::Usage(format!("--v0 must be a number, `stationary` or `burn-in`, got `{}`", args.v0)))?;
        InitialVariance::Fixed(v)
    };
    let cfg = SimConfig {
        params,
        v0,
        dt: args.dt,
        horizon: args.horizon,
        n_paths: args.paths,
        seed: args.seed,
    };
    let out = simulate_returns(&cfg)?;
    let summary = SimSummary {
        params,
        v0: args.v0.clone(),
        dt: args.dt,
        horizon: args.horizon,
        n_paths: args.paths,
        seed: args.seed,
        mean: mean(&out.samples),
        variance: variance(&out.samples),
        excess_kurtosis: if out.samples.len() >= 4 { excess_kurtosis(&out.samples)? } else { f64::NAN },
        clamp_count: out.clamp_count,
    };
    ensure_dir(&args.out)?;
    let mut text = String::with_capacity(out.samples.len() * 24);
    for x in &out.samples {
        let _ = writeln!(text, "{x:e}");
    }
    write_text(&args.out.join("samples.txt"), &text)?;
    write_json(&args.out.join("summary.json"), &summary)?;
    let line = format!(
        "paths={} mean={:.6e} variance={:.6e} excess_kurtosis={:.4} clamps={}\n",
        summary.n_paths, summary.mean, summary.variance, summary.excess_kurtosis, summary.clamp_count
    );
    stdout.write_all(line.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

pub fn kurtosis_rows(prices: &heston_gof_core::market::PriceSeries, lags: &[TimeLag]) -> CliResult<Vec<KurtosisRow>> {
    lags.iter()
        .map(|&tau| {
            let r = overlapping_returns(prices, tau)?;
            let untrimmed = excess_kurtosis(&r)?;
            let trimmed = match TrimBounds::for_lag(tau) {
                Some(b) => Some(excess_kurtosis(&trim_returns(&r, b).returns)?),
                None => None,
            };
            Ok(KurtosisRow { lag: tau, untrimmed, trimmed })
        })
        .collect()
}

pub fn kurtosis(args: &KurtosisArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let lags = parse_lags(&args.lags)?;
    let prices = read_prices(&args.input)?;
    let rows = kurtosis_rows(&prices, &lags)?;
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        write_json(&dir.join("kurtosis.json"), &rows)?;
    }
    stdout
        .write_all(render_kurtosis(&rows).as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Replicate(a) => replicate(a, stdout),
        Command::Test(a) => test(a, stdout),
        Command::Simulate(a) => simulate(a, stdout),
        Command::Kurtosis(a) => kurtosis(a, stdout),
    }
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

