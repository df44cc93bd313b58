use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wtail::distributions::DistributionSpec;

/// Extreme quantile estimation for Weibull tail-distributions.
#[derive(Debug, Parser, Serialize)]
#[command(name = "wtail", version)]
pub struct Cli {
    /// Print errors as a JSON object on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    #[serde(skip)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Fit the tail and estimate an extreme quantile.
    Estimate(EstimateArgs),
    /// Choose k by minimizing the estimated AMSE.
    SelectK(SelectArgs),
    /// Monte-Carlo bias/MSE curves of both estimators.
    Simulate(SimulateArgs),
    /// Log-quantile samples at k_opt and at the adaptive k.
    Boxplot(BoxplotArgs),
    /// N-year return levels from exceedance data.
    ReturnLevel(ReturnLevelArgs),
    /// Asymptotic bias and variance factors.
    Limits(LimitsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    Classic,
    Reduced,
    Both,
}

/// How `k` is chosen; without `--k` the AMSE minimizer is used.
#[derive(Debug, Clone, Args, Serialize)]
pub struct KArgs {
    /// Number of upper order statistics.
    #[arg(long, conflicts_with = "auto_k")]
    pub k: Option<usize>,

    /// Pick k by minimizing the estimated AMSE (default when --k is absent).
    #[arg(long)]
    pub auto_k: bool,

    /// Lower end of the selection grid.
    #[arg(long, conflicts_with = "k")]
    pub kmin: Option<usize>,

    /// Upper end of the selection grid.
    #[arg(long, conflicts_with = "k")]
    pub kmax: Option<usize>,
}

/// Target tail probability, directly or as `p = n^-tau`.
#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct TargetArgs {
    #[arg(long)]
    pub p: Option<f64>,

    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// Data file: one positive number per line, `#` comments.
    pub file: PathBuf,

    #[command(flatten)]
    pub k: KArgs,

    #[command(flatten)]
    pub target: TargetArgs,

    /// Plug-in second-order parameter for the reduced estimator.
    #[arg(long, default_value_t = wtail::quantile::DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho: f64,

    #[arg(long, value_enum, default_value_t = EstimatorChoice::Both)]
    pub estimator: EstimatorChoice,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    pub file: PathBuf,

    #[command(flatten)]
    pub target: TargetArgs,

    #[arg(long)]
    pub kmin: Option<usize>,

    #[arg(long)]
    pub kmax: Option<usize>,

    /// Moving-average window applied to the AMSE curve.
    #[arg(long)]
    pub smooth: Option<usize>,

    /// Write the (k, amse) curve as CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,

    /// Include the variance and squared-bias terms per k in the report.
    #[arg(long)]
    pub terms: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimCommon {
    /// Law to simulate: absnormal, gamma:SHAPE,RATE, weibull:SHAPE,SCALE, dclass:ALPHA,BETA.
    #[arg(long)]
    pub dist: DistributionSpec,

    #[arg(long, default_value_t = 500)]
    pub n: usize,

    #[arg(long, default_value_t = 500)]
    pub replicates: usize,

    /// Extrapolation levels; each target is p = n^-tau.
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0])]
    pub taus: Vec<f64>,

    #[arg(long, env = "EVT_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    /// Run replicates on one thread; results are identical either way.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: SimCommon,

    #[arg(long, default_value_t = 2)]
    pub kmin: usize,

    /// Defaults to min(360, n - 1).
    #[arg(long)]
    pub kmax: Option<usize>,

    #[arg(long, default_value_t = wtail::quantile::DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho_plugin: f64,

    /// Also write boxplot samples.
    #[arg(long)]
    pub boxplots: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BoxplotArgs {
    #[command(flatten)]
    pub common: SimCommon,
}

#[derive(Debug, Args, Serialize)]
pub struct ReturnLevelArgs {
    pub file: PathBuf,

    /// Length of the observation period in years.
    #[arg(long)]
    pub years: f64,

    /// Number of exceedances in the period; defaults to the sample size.
    #[arg(long)]
    pub count: Option<usize>,

    /// Return period in years; repeat for several.
    #[arg(long = "N", required = true)]
    pub horizons: Vec<f64>,

    #[command(flatten)]
    pub k: KArgs,

    #[arg(long, value_enum, default_value_t = EstimatorChoice::Classic)]
    pub estimator: EstimatorChoice,

    #[arg(long, default_value_t = wtail::quantile::DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho: f64,

    /// Exceedance threshold, echoed in the report.
    #[arg(long)]
    pub threshold: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitsArgs {
    #[arg(long)]
    pub tau: f64,

    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,

    #[arg(long, default_value_t = wtail::quantile::DEFAULT_RHO, allow_hyphen_values = true)]
    pub rho_plugin: f64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
