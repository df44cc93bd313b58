//! Order statistics, log-spacings and the tail-coefficient estimators.
//!
//! With `X_{1,n} <= ... <= X_{n,n}` the ascending order statistics, the
//! rescaled log-spacings
//!
//! ```text
//! Z_j = j log(n/j) (log X_{n-j+1,n} - log X_{n-j,n}),   j = 1..k
//! ```
//!
//! are approximately exponential with mean `θ + b(log(n/k)) x_j`, where
//! `x_j = log(n/k) / log(n/j)`. Their plain mean is θ̃; regressing them on
//! `x_j` gives the least-squares pair (θ̂, b̂).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ascending order statistics of a strictly positive sample, `n >= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    values: Vec<f64>,
}

impl OrderedSample {
    /// Sorts `raw` ascending. Ties are kept.
    pub fn new(mut raw: Vec<f64>) -> Result<Self> {
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveValue { index, value });
            }
        }
        if raw.len() < 3 {
            return Err(Error::TooSmall { n: raw.len() });
        }
        raw.sort_by(f64::total_cmp);
        Ok(Self { values: raw })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `X_{n-j+1,n}`, the j-th largest value (`j` in `1..=n`).
    pub fn upper(&self, j: usize) -> f64 {
        self.values[self.values.len() - j]
    }

    /// The anchor order statistic `X_{n-k+1,n}` used by the quantile estimators.
    pub fn anchor(&self, k: usize) -> Result<f64> {
        check_k(self.len(), k)?;
        Ok(self.upper(k))
    }

    /// The sample multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("scale factor must be positive, got {c}")));
        }
        Self::new(self.values.iter().map(|v| v * c).collect())
    }
}

/// Shorthand for [`OrderedSample::new`].
pub fn make_ordered(raw: Vec<f64>) -> Result<OrderedSample> {
    OrderedSample::new(raw)
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k + 1 > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

/// `log(n/k)`, written as `-log(k/n)` so that `p = k/n` yields `τ = 1` exactly.
pub(crate) fn log_n_over(n: usize, k: usize) -> f64 {
    -(k as f64 / n as f64).ln()
}

/// The rescaled log-spacings `Z_1..Z_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpacings {
    z: Vec<f64>,
}

impl LogSpacings {
    pub fn k(&self) -> usize {
        self.z.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn mean(&self) -> f64 {
        self.z.iter().sum::<f64>() / self.z.len() as f64
    }

    /// `Z_1..Z_k` of a longer spacing vector; `Z_j` does not depend on `k`.
    pub(crate) fn prefix(&self, k: usize) -> LogSpacings {
        LogSpacings { z: self.z[..k].to_vec() }
    }
}

pub fn log_spacings(s: &OrderedSample, k: usize) -> Result<LogSpacings> {
    let n = s.len();
    check_k(n, k)?;
    let z = (1..=k)
        .map(|j| {
            // log of the ratio equals the difference of logs and keeps full
            // precision for close order statistics
            let gap = (s.upper(j) / s.upper(j + 1)).ln();
            j as f64 * (n as f64 / j as f64).ln() * gap
        })
        .collect();
    Ok(LogSpacings { z })
}

/// Regressors `x_j = log(n/k) / log(n/j)` with their mean and mean squared deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoints {
    x: Vec<f64>,
    x_bar: f64,
    s_xx: f64,
}

impl DesignPoints {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_k(n, k)?;
        let log_nk = log_n_over(n, k);
        let x: Vec<f64> = (1..=k).map(|j| log_nk / log_n_over(n, j)).collect();
        let kf = k as f64;
        let x_bar = x.iter().sum::<f64>() / kf;
        let s_xx = x.iter().map(|v| (v - x_bar).powi(2)).sum::<f64>() / kf;
        Ok(Self { x, x_bar, s_xx })
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn x_bar(&self) -> f64 {
        self.x_bar
    }

    pub fn s_xx(&self) -> f64 {
        self.s_xx
    }
}

/// Joint tail estimate at a given `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub theta_tilde: f64,
    pub theta_hat: f64,
    /// Estimate of `b(log(n/k))`.
    pub b_hat: f64,
    pub k: usize,
    pub n: usize,
    /// Mean of the design points, kept for the AMSE estimate.
    pub x_bar: f64,
}

/// θ̃: the mean of the log-spacings.
pub fn theta_tilde(s: &OrderedSample, k: usize) -> Result<f64> {
    Ok(log_spacings(s, k)?.mean())
}

/// Least-squares fit of `Z_j = θ + b x_j`.
pub fn ls_fit(s: &OrderedSample, k: usize) -> Result<TailFit> {
    let z = log_spacings(s, k)?;
    let design = DesignPoints::new(s.len(), k)?;
    fit_spacings(&z, &design, s.len())
}

pub(crate) fn fit_spacings(z: &LogSpacings, design: &DesignPoints, n: usize) -> Result<TailFit> {
    let k = z.k();
    if !(design.s_xx > 0.0) {
        return Err(Error::DegenerateDesign { k });
    }
    let z_bar = z.mean();
    let cross: f64 = design
        .x
        .iter()
        .zip(&z.z)
        .map(|(x, z)| (x - design.x_bar) * z)
        .sum();
    let b_hat = cross / (design.s_xx * k as f64);
    Ok(TailFit {
        theta_tilde: z_bar,
        theta_hat: z_bar - b_hat * design.x_bar,
        b_hat,
        k,
        n,
        x_bar: design.x_bar,
    })
}

/// `K_ρ(λ) = ∫_1^λ t^{ρ-1} dt` for `λ >= 1` and `ρ <= 0`.
///
/// `ρ = -∞` gives the pointwise limit 0.
pub fn k_rho(rho: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("K_rho needs lambda >= 1, got {lambda}")));
    }
    if !(rho <= 0.0) {
        return Err(Error::domain(format!("K_rho needs rho <= 0, got {rho}")));
    }
    Ok(kernel(rho, lambda))
}

/// The same integral without the domain check; negative for `λ < 1`.
pub(crate) fn kernel(rho: f64, lambda: f64) -> f64 {
    let log_l = lambda.ln();
    if rho == f64::NEG_INFINITY {
        return if lambda >= 1.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if rho.abs() < 1e-12 {
        return log_l;
    }
    let arg = rho * log_l;
    if arg.abs() < 1e-4 {
        arg.exp_m1() / rho
    } else {
        (lambda.powf(rho) - 1.0) / rho
    }
}
