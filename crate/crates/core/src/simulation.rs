//! Monte-Carlo harness: median/MSE curves of both log-quantile estimators
//! over a `k` grid, paired boxplot samples at the optimal and the adaptive
//! `k`, and the limit-law oracles.
//!
//! Replicate `i` draws from `Rng::new(seed, i)` and one sample serves every
//! `(τ, k)` cell. Replicates run on the rayon pool; results are assembled in
//! replicate order, so serial and parallel runs are bit-identical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Rng, TailMeta};
use crate::quantile::{self, tau_of, DEFAULT_RHO};
use crate::selection::{self, KGrid};
use crate::tail::{self, kernel, log_n_over, DesignPoints, OrderedSample};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    pub spec: DistributionSpec,
    pub n: usize,
    pub replicates: usize,
    /// Exponents for `p = n^{-τ}`.
    pub taus: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub rho_plugin: f64,
    pub seed: u64,
}

impl SimPlan {
    /// n = 500, 500 replicates, τ ∈ {2, 4}, k = 2..=360, ρ# = −1.
    pub fn new(spec: DistributionSpec, seed: u64) -> Self {
        Self {
            spec,
            n: 500,
            replicates: 500,
            taus: vec![2.0, 4.0],
            k_grid: (2..=360).collect(),
            rho_plugin: DEFAULT_RHO,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.n < 3 {
            return Err(Error::TooSmall { n: self.n });
        }
        if self.replicates == 0 {
            return Err(Error::domain("at least one replicate is required"));
        }
        if let Some(&tau) = self.taus.iter().find(|&&t| !(t > 1.0 && t.is_finite())) {
            return Err(Error::domain(format!("tau exponents must exceed 1, got {tau}")));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k < 2 || k + 1 > self.n) {
            return Err(Error::KOutOfRange { k, n: self.n });
        }
        if !(self.rho_plugin < 0.0 && self.rho_plugin.is_finite()) {
            return Err(Error::domain(format!("rho plug-in must be negative, got {}", self.rho_plugin)));
        }
        Ok(())
    }

    /// `p = n^{-τ}`.
    pub fn tail_probability(&self, tau: f64) -> f64 {
        (self.n as f64).powf(-tau)
    }

    fn max_k(&self) -> usize {
        self.k_grid.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

fn run_replicates<T, F>(count: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    match exec {
        Execution::Serial => (0..count as u64).map(f).collect(),
        Execution::Parallel => (0..count as u64).into_par_iter().map(f).collect(),
    }
}

fn draw(plan: &SimPlan, replicate: u64) -> Result<OrderedSample> {
    let mut rng = Rng::new(plan.seed, replicate);
    OrderedSample::new(plan.spec.sample(plan.n, &mut rng)?)
}

/// Distributional summary of one cell over replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub median: f64,
    pub mean: f64,
    /// Population variance (divisor N).
    pub variance: f64,
    /// `(1/N) Σ (v − truth)²`.
    pub mse: f64,
}

impl CellStats {
    pub fn new(values: &[f64], truth: f64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mse = values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / n;
        Self { median: median(values), mean, variance, mse }
    }
}

/// Median; the midpoint of the two central values for even length.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Linear-interpolation sample quantile, `q` in [0, 1].
pub fn sample_quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = q * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Unbiased sample variance (divisor N − 1).
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// One-sample Kolmogorov–Smirnov statistic against `cdf`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// One row of a curve table; also the CSV record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub tau: f64,
    pub k: usize,
    pub median_classic: f64,
    pub median_reduced: f64,
    pub mse_classic: f64,
    pub mse_reduced: f64,
    pub true_log_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub tau: f64,
    pub true_log_quantile: f64,
    pub rows: Vec<CurveRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveOutput {
    pub plan: SimPlan,
    pub tables: Vec<CurveTable>,
}

pub fn run_curves(plan: &SimPlan) -> Result<CurveOutput> {
    run_curves_with(plan, Execution::Parallel)
}

pub fn run_curves_with(plan: &SimPlan, exec: Execution) -> Result<CurveOutput> {
    plan.validate()?;
    let truths = plan
        .taus
        .iter()
        .map(|&tau| Ok(plan.spec.true_quantile(plan.tail_probability(tau))?.ln()))
        .collect::<Result<Vec<f64>>>()?;
    let designs = plan
        .k_grid
        .iter()
        .map(|&k| DesignPoints::new(plan.n, k))
        .collect::<Result<Vec<_>>>()?;
    let cells = plan.taus.len() * plan.k_grid.len();

    // per replicate: [(classic, reduced); τ-major, k-minor]
    let per_replicate = run_replicates(plan.replicates, exec, |i| {
        let s = draw(plan, i)?;
        let mut out = Vec::with_capacity(cells);
        if plan.k_grid.is_empty() {
            return Ok(out);
        }
        let all = tail::log_spacings(&s, plan.max_k())?;
        let fits = plan
            .k_grid
            .iter()
            .zip(&designs)
            .map(|(&k, d)| tail::fit_spacings(&all.prefix(k), d, plan.n))
            .collect::<Result<Vec<_>>>()?;
        for &tau in &plan.taus {
            let p = plan.tail_probability(tau);
            for fit in &fits {
                let classic = quantile::quantile_classic(&s, fit.k, p, fit.theta_tilde)?;
                let reduced = quantile::quantile_reduced_from_fit(&s, fit, p, plan.rho_plugin)?;
                out.push((classic.log_value, reduced.log_value));
            }
        }
        Ok(out)
    })?;

    let mut tables = Vec::with_capacity(plan.taus.len());
    let mut classic = vec![0.0; plan.replicates];
    let mut reduced = vec![0.0; plan.replicates];
    for (ti, (&tau, &truth)) in plan.taus.iter().zip(&truths).enumerate() {
        let mut rows = Vec::with_capacity(plan.k_grid.len());
        for (ki, &k) in plan.k_grid.iter().enumerate() {
            let cell = ti * plan.k_grid.len() + ki;
            for (r, rep) in per_replicate.iter().enumerate() {
                classic[r] = rep[cell].0;
                reduced[r] = rep[cell].1;
            }
            let c = CellStats::new(&classic, truth);
            let d = CellStats::new(&reduced, truth);
            rows.push(CurveRow {
                tau,
                k,
                median_classic: c.median,
                median_reduced: d.median,
                mse_classic: c.mse,
                mse_reduced: d.mse,
                true_log_q: truth,
            });
        }
        tables.push(CurveTable { tau, true_log_quantile: truth, rows });
    }
    Ok(CurveOutput { plan: plan.clone(), tables })
}

/// Paired log-quantile samples for one τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotOutput {
    pub distribution: DistributionSpec,
    pub n: usize,
    pub tau: f64,
    pub p: f64,
    pub k_opt: usize,
    pub k_hat: Vec<usize>,
    pub log_at_k_opt: Vec<f64>,
    pub log_at_k_hat: Vec<f64>,
    pub true_log_quantile: f64,
    pub grid: KGrid,
}

pub fn run_boxplots(plan: &SimPlan) -> Result<Vec<BoxplotOutput>> {
    run_boxplots_with(plan, Execution::Parallel)
}

/// `k_opt` and `k̂` are both searched on [`KGrid::default_for`]`(n)`.
pub fn run_boxplots_with(plan: &SimPlan, exec: Execution) -> Result<Vec<BoxplotOutput>> {
    plan.validate()?;
    let meta = plan.spec.tail_meta();
    let grid = KGrid::default_for(plan.n);
    KGrid::new(grid.k_min, grid.k_max, plan.n)?;
    let setups = plan
        .taus
        .iter()
        .map(|&tau| {
            let p = plan.tail_probability(tau);
            let k_opt = selection::k_opt_true(&meta, plan.n, p, grid.k_min, grid.k_max)?.k_hat;
            let truth = plan.spec.true_quantile(p)?.ln();
            Ok((tau, p, k_opt, truth))
        })
        .collect::<Result<Vec<_>>>()?;

    // per replicate, per τ: (k̂, log x̃ at k_opt, log x̃ at k̂)
    let per_replicate = run_replicates(plan.replicates, exec, |i| {
        let s = draw(plan, i)?;
        setups
            .iter()
            .map(|&(_, p, k_opt, _)| {
                let k_hat = selection::select_k(&s, p, grid.k_min, grid.k_max)?.k_hat;
                let at_opt = quantile::quantile_classic_default(&s, k_opt, p)?.log_value;
                let at_hat = quantile::quantile_classic_default(&s, k_hat, p)?.log_value;
                Ok((k_hat, at_opt, at_hat))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    Ok(setups
        .iter()
        .enumerate()
        .map(|(ti, &(tau, p, k_opt, truth))| BoxplotOutput {
            distribution: plan.spec,
            n: plan.n,
            tau,
            p,
            k_opt,
            k_hat: per_replicate.iter().map(|r| r[ti].0).collect(),
            log_at_k_opt: per_replicate.iter().map(|r| r[ti].1).collect(),
            log_at_k_hat: per_replicate.iter().map(|r| r[ti].2).collect(),
            true_log_quantile: truth,
            grid,
        })
        .collect())
}

/// Asymptotic bias and variance factors of both estimators when `τ_n → τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub tau: f64,
    pub rho: f64,
    pub rho_plugin: f64,
    /// `K_ρ#(τ) − K_ρ(τ)`
    pub mu_tau: f64,
    /// `(K_ρ#(τ) − log τ)²`
    pub sigma2_tau: f64,
    /// `log τ − K_ρ(τ)`
    pub mu_tilde_tau: f64,
    /// `log² τ`
    pub sigma2_tilde_tau: f64,
}

pub fn limit_params(tau: f64, rho: f64, rho_plugin: f64) -> Result<LimitParams> {
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(Error::domain(format!("tau must exceed 1, got {tau}")));
    }
    if !(rho < 0.0) {
        return Err(Error::domain(format!("rho must be negative, got {rho}")));
    }
    if !(rho_plugin < 0.0 && rho_plugin.is_finite()) {
        return Err(Error::domain(format!("rho plug-in must be negative, got {rho_plugin}")));
    }
    let log_tau = tau.ln();
    let k_true = kernel(rho, tau);
    let k_plug = kernel(rho_plugin, tau);
    Ok(LimitParams {
        tau,
        rho,
        rho_plugin,
        mu_tau: k_plug - k_true,
        sigma2_tau: (k_plug - log_tau).powi(2),
        mu_tilde_tau: log_tau - k_true,
        sigma2_tilde_tau: log_tau * log_tau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalitySummary {
    pub theta: f64,
    pub k: usize,
    pub tau_n: f64,
    /// Deterministic bias removed before standardizing.
    pub bias_term: f64,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    /// KS distance of the standardized errors from N(0, θ²).
    pub ks_statistic: f64,
    pub standardized: Vec<f64>,
}

/// `b(log(n/k)) { (log τ_n / k) Σ_j (log(n/j)/log(n/k))^ρ − K_ρ(τ_n) }`.
pub fn classic_bias_term(meta: &TailMeta, n: usize, k: usize, tau_n: f64) -> f64 {
    if meta.b.is_zero() {
        return 0.0;
    }
    let log_nk = log_n_over(n, k);
    let mean_pow = (1..=k).map(|j| (log_n_over(n, j) / log_nk).powf(meta.rho)).sum::<f64>() / k as f64;
    meta.b.eval(log_nk) * (tau_n.ln() * mean_pow - kernel(meta.rho, tau_n))
}

/// Standardized errors `(√k / log τ_n)(log x̃ − log x_p − bias)` of the
/// classical estimator at `p = n^{-tau}`, which are asymptotically N(0, θ²).
pub fn normality_check(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    tau: f64,
    replicates: usize,
    seed: u64,
) -> Result<NormalitySummary> {
    let plan = SimPlan { spec: *spec, n, replicates, taus: vec![tau], k_grid: vec![k], rho_plugin: DEFAULT_RHO, seed };
    plan.validate()?;
    if replicates < 2 {
        return Err(Error::domain("normality check needs at least two replicates"));
    }
    let meta = spec.tail_meta();
    let p = plan.tail_probability(tau);
    let tau_n = tau_of(p, n, k)?.value;
    let truth = spec.true_quantile(p)?.ln();
    let bias = classic_bias_term(&meta, n, k, tau_n);
    let scale = (k as f64).sqrt() / tau_n.ln();
    let standardized = run_replicates(replicates, Execution::Parallel, |i| {
        let s = draw(&plan, i)?;
        let est = quantile::quantile_classic_default(&s, k, p)?;
        Ok(scale * (est.log_value - truth - bias))
    })?;
    let mean = standardized.iter().sum::<f64>() / replicates as f64;
    let variance = sample_variance(&standardized);
    let theta = meta.theta;
    let ks = ks_statistic(&standardized, |x| crate::distributions::special::std_normal_cdf(x / theta));
    Ok(NormalitySummary {
        theta,
        k,
        tau_n,
        bias_term: bias,
        mean,
        variance,
        std_dev: variance.sqrt(),
        ks_statistic: ks,
        standardized,
    })
}
