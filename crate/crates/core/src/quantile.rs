//! Extreme quantile estimators and N-year return levels.

use serde::{Deserialize, Serialize};

use crate::selection::{self, KGrid, SelectionResult};
use crate::tail::{self, check_k, kernel, log_n_over, OrderedSample, TailFit};
use crate::{Error, Result};

/// Canonical plug-in value for the second-order parameter.
pub const DEFAULT_RHO: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// `X_{n-k+1,n} τ^θ`
    Classic,
    /// `X_{n-k+1,n} τ^θ̂ exp(b̂ K_ρ(τ))`
    Reduced,
}

/// Extrapolation factor `τ = log(1/p) / log(n/k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tau {
    pub value: f64,
    /// `τ <= 1`: the target lies inside the sample range, no extrapolation.
    pub no_extrapolation: bool,
}

pub fn tau_of(p: f64, n: usize, k: usize) -> Result<Tau> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("tail probability must be in (0, 1), got {p}")));
    }
    check_k(n, k)?;
    let value = -p.ln() / log_n_over(n, k);
    Ok(Tau { value, no_extrapolation: value <= 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    pub value: f64,
    pub log_value: f64,
    pub kind: EstimatorKind,
    pub tau: f64,
    pub k: usize,
    /// Tail coefficient used in the exponent.
    pub theta: f64,
    /// `None` for the classical estimator.
    pub rho_used: Option<f64>,
    pub no_extrapolation: bool,
}

fn extrapolate(anchor: f64, tau: Tau, theta: f64, k: usize) -> QuantileEstimate {
    QuantileEstimate {
        value: anchor * tau.value.powf(theta),
        log_value: anchor.ln() + theta * tau.value.ln(),
        kind: EstimatorKind::Classic,
        tau: tau.value,
        k,
        theta,
        rho_used: None,
        no_extrapolation: tau.no_extrapolation,
    }
}

/// Classical estimator with an arbitrary tail coefficient.
pub fn quantile_classic(s: &OrderedSample, k: usize, p: f64, theta: f64) -> Result<QuantileEstimate> {
    let tau = tau_of(p, s.len(), k)?;
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    Ok(extrapolate(s.anchor(k)?, tau, theta, k))
}

/// Classical estimator with θ̃.
pub fn quantile_classic_default(s: &OrderedSample, k: usize, p: f64) -> Result<QuantileEstimate> {
    let theta = tail::theta_tilde(s, k)?;
    quantile_classic(s, k, p, theta)
}

/// Bias-reduced estimator from the least-squares fit at `k`.
pub fn quantile_reduced(s: &OrderedSample, k: usize, p: f64, rho_plugin: f64) -> Result<QuantileEstimate> {
    let fit = tail::ls_fit(s, k)?;
    quantile_reduced_from_fit(s, &fit, p, rho_plugin)
}

/// Bias-reduced estimator reusing an existing fit at `fit.k`.
pub fn quantile_reduced_from_fit(
    s: &OrderedSample,
    fit: &TailFit,
    p: f64,
    rho_plugin: f64,
) -> Result<QuantileEstimate> {
    if !(rho_plugin < 0.0) || !rho_plugin.is_finite() {
        return Err(Error::domain(format!("rho plug-in must be negative and finite, got {rho_plugin}")));
    }
    if fit.n != s.len() {
        return Err(Error::domain("fit does not belong to this sample"));
    }
    let tau = tau_of(p, s.len(), fit.k)?;
    let correction = fit.b_hat * kernel(rho_plugin, tau.value);
    let base = extrapolate(s.anchor(fit.k)?, tau, fit.theta_hat, fit.k);
    Ok(QuantileEstimate {
        value: base.value * correction.exp(),
        log_value: base.log_value + correction,
        kind: EstimatorKind::Reduced,
        rho_used: Some(rho_plugin),
        ..base
    })
}

/// Observation window and horizon of an N-year return level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnLevelQuery {
    pub years_observed: f64,
    pub n_exceedances: usize,
    pub horizon_years: f64,
    /// Level defining the exceedances; reported only.
    pub threshold: Option<f64>,
}

impl ReturnLevelQuery {
    /// `p = years / (count · N)`: one exceedance in `N` years among `count` per `years`.
    pub fn tail_probability(&self) -> Result<f64> {
        let p = self.years_observed / (self.n_exceedances as f64 * self.horizon_years);
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidHorizon { p });
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KChoice {
    Fixed(usize),
    /// Minimize the estimated AMSE over the grid.
    Auto(KGrid),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnLevel {
    pub horizon_years: f64,
    pub p: f64,
    pub estimate: QuantileEstimate,
    pub fit: TailFit,
    /// Present when `k` was chosen adaptively.
    pub selection: Option<SelectionResult>,
}

pub fn return_level(
    s: &OrderedSample,
    q: &ReturnLevelQuery,
    choice: &KChoice,
    kind: EstimatorKind,
    rho_plugin: f64,
) -> Result<ReturnLevel> {
    let p = q.tail_probability()?;
    let (k, selection) = match choice {
        KChoice::Fixed(k) => (*k, None),
        KChoice::Auto(grid) => {
            let sel = selection::select_k(s, p, grid.k_min, grid.k_max)?;
            (sel.k_hat, Some(sel))
        }
    };
    let fit = tail::ls_fit(s, k)?;
    let estimate = match kind {
        EstimatorKind::Classic => quantile_classic(s, k, p, fit.theta_tilde)?,
        EstimatorKind::Reduced => quantile_reduced_from_fit(s, &fit, p, rho_plugin)?,
    };
    Ok(ReturnLevel { horizon_years: q.horizon_years, p, estimate, fit, selection })
}
