//! Log-scale AMSE of the classical estimator and the adaptive choice of `k`.
//!
//! ```text
//! AMSE(k) = θ² log²τ / k + b²(log(n/k)) { (log τ / k) Σ_j (log(n/j)/log(n/k))^ρ − K_ρ(τ) }²
//! ```
//!
//! The estimated version plugs in (θ̂, b̂) from the least-squares fit and
//! fixes ρ = −1, where the bracket becomes `log τ · x̄ + τ^{-1} − 1`.

use serde::{Deserialize, Serialize};

use crate::distributions::TailMeta;
use crate::quantile::tau_of;
use crate::tail::{self, check_k, kernel, log_n_over, OrderedSample};
use crate::{Error, Result};

/// Inclusive search range for `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KGrid {
    pub k_min: usize,
    pub k_max: usize,
}

impl KGrid {
    pub fn new(k_min: usize, k_max: usize, n: usize) -> Result<Self> {
        if k_min < 2 || k_min >= k_max || k_max + 1 > n {
            return Err(Error::EmptyGrid { k_min, k_max });
        }
        Ok(Self { k_min, k_max })
    }

    /// `[max(2, ⌈0.02 n⌉), min(⌊0.9 n⌋, n − 1)]`.
    pub fn default_for(n: usize) -> Self {
        let k_min = ((0.02 * n as f64).ceil() as usize).max(2);
        let k_max = ((0.9 * n as f64).floor() as usize).min(n.saturating_sub(1));
        Self { k_min, k_max }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.k_min..=self.k_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmseKind {
    True,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmseCurve {
    pub k_values: Vec<usize>,
    pub amse: Vec<f64>,
    pub kind: AmseKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub k_hat: usize,
    pub curve: AmseCurve,
    /// More than one grid point attained the minimum.
    pub tie_policy_applied: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelectOptions {
    /// Centered moving-average window applied to the curve before the argmin.
    pub smoothing: Option<usize>,
}

/// `(1/k) Σ_{j=1}^{k} (log(n/j)/log(n/k))^ρ`.
fn design_power_mean(n: usize, k: usize, rho: f64) -> f64 {
    let log_nk = log_n_over(n, k);
    (1..=k).map(|j| (log_n_over(n, j) / log_nk).powf(rho)).sum::<f64>() / k as f64
}

/// The true AMSE from the tail metadata of a known law.
pub fn amse_true(meta: &TailMeta, n: usize, k: usize, p: f64) -> Result<f64> {
    let tau = tau_of(p, n, k)?.value;
    let log_tau = tau.ln();
    let variance = meta.theta.powi(2) * log_tau.powi(2) / k as f64;
    if meta.b.is_zero() {
        return Ok(variance);
    }
    let b = meta.b.eval(log_n_over(n, k));
    let bracket = log_tau * design_power_mean(n, k, meta.rho) - kernel(meta.rho, tau);
    Ok(variance + b * b * bracket * bracket)
}

/// The AMSE with plugged-in `theta` and `b` and ρ fixed at −1.
pub fn amse_estimated_with(theta: f64, b: f64, n: usize, k: usize, p: f64) -> Result<f64> {
    let t = amse_terms_with(theta, b, n, k, p)?;
    Ok(t.variance + t.bias_sq)
}

/// The two terms of the estimated AMSE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmseTerms {
    pub k: usize,
    pub variance: f64,
    pub bias_sq: f64,
}

pub fn amse_terms_with(theta: f64, b: f64, n: usize, k: usize, p: f64) -> Result<AmseTerms> {
    let tau = tau_of(p, n, k)?.value;
    let log_tau = tau.ln();
    let log_nk = log_n_over(n, k);
    let sum: f64 = (1..=k).map(|j| (log_n_over(n, j) / log_nk).recip()).sum();
    let bracket = log_tau / k as f64 * sum + tau.recip() - 1.0;
    Ok(AmseTerms { k, variance: theta * theta * log_tau * log_tau / k as f64, bias_sq: b * b * bracket * bracket })
}

pub fn amse_terms(s: &OrderedSample, k: usize, p: f64) -> Result<AmseTerms> {
    let fit = tail::ls_fit(s, k)?;
    amse_terms_with(fit.theta_hat, fit.b_hat, s.len(), k, p)
}

/// The AMSE estimated from the sample's least-squares fit at `k`.
pub fn amse_estimated(s: &OrderedSample, k: usize, p: f64) -> Result<f64> {
    let fit = tail::ls_fit(s, k)?;
    amse_estimated_with(fit.theta_hat, fit.b_hat, s.len(), k, p)
}

fn argmin(curve: AmseCurve) -> Result<SelectionResult> {
    let mut best: Option<(usize, f64)> = None;
    let mut ties = 0;
    for (i, &v) in curve.amse.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::domain(format!("AMSE is NaN at k = {}", curve.k_values[i])));
        }
        match best {
            None => {
                best = Some((i, v));
                ties = 1;
            }
            Some((_, b)) if v < b => {
                best = Some((i, v));
                ties = 1;
            }
            Some((_, b)) if v == b => ties += 1,
            _ => {}
        }
    }
    let (i, _) = best.ok_or(Error::EmptyGrid { k_min: 0, k_max: 0 })?;
    Ok(SelectionResult { k_hat: curve.k_values[i], tie_policy_applied: ties > 1, curve })
}

fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn check_grid(n: usize, k_min: usize, k_max: usize) -> Result<KGrid> {
    if k_min >= k_max {
        return Err(Error::EmptyGrid { k_min, k_max });
    }
    check_k(n, k_min)?;
    check_k(n, k_max)?;
    Ok(KGrid { k_min, k_max })
}

/// Adaptive `k̂`: argmin of the estimated AMSE, ties to the smallest `k`.
pub fn select_k(s: &OrderedSample, p: f64, k_min: usize, k_max: usize) -> Result<SelectionResult> {
    select_k_with(s, p, k_min, k_max, SelectOptions::default())
}

pub fn select_k_with(
    s: &OrderedSample,
    p: f64,
    k_min: usize,
    k_max: usize,
    opts: SelectOptions,
) -> Result<SelectionResult> {
    let grid = check_grid(s.len(), k_min, k_max)?;
    let k_values: Vec<usize> = grid.iter().collect();
    let mut amse = k_values
        .iter()
        .map(|&k| amse_estimated(s, k, p))
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = opts.smoothing.filter(|&w| w > 1) {
        amse = smooth(&amse, w);
    }
    argmin(AmseCurve { k_values, amse, kind: AmseKind::Estimated })
}

/// `k` minimizing the true AMSE of a known law.
pub fn k_opt_true(meta: &TailMeta, n: usize, p: f64, k_min: usize, k_max: usize) -> Result<SelectionResult> {
    let grid = check_grid(n, k_min, k_max)?;
    let k_values: Vec<usize> = grid.iter().collect();
    let amse = k_values
        .iter()
        .map(|&k| amse_true(meta, n, k, p))
        .collect::<Result<Vec<_>>>()?;
    argmin(AmseCurve { k_values, amse, kind: AmseKind::True })
}

/// `k = (λ log n / b(log n))²`, unrounded.
pub fn remark1_k(meta: &TailMeta, n: usize, lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be finite and nonzero, got {lambda}")));
    }
    let log_n = (n as f64).ln();
    let b = meta.b.eval(log_n);
    if b == 0.0 {
        return Err(Error::ZeroBias);
    }
    Ok((lambda * log_n / b).powi(2))
}
