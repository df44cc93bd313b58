//! Extreme quantile estimation for Weibull tail-distributions.
//!
//! A distribution has a Weibull tail when `1 - F(x) = exp(-H(x))` with
//! `H^{-1}(x) = x^θ ℓ(x)` and `ℓ` slowly varying. This crate provides
//!
//! - [`tail`]: order statistics, log-spacings and the two estimators of the
//!   tail coefficient θ (the spacing mean θ̃ and the least-squares pair (θ̂, b̂)),
//! - [`quantile`]: the classical extrapolation `X_{n-k+1,n} τ^θ̃` and the
//!   bias-reduced variant with the `exp(b̂ K_ρ(τ))` correction, plus N-year
//!   return levels from exceedance data,
//! - [`selection`]: the log-scale AMSE of the classical estimator, true and
//!   estimated, and the adaptive choice of `k`,
//! - [`distributions`]: reproducible samplers and exact tail metadata for
//!   |N(0,1)|, Gamma, Weibull and the D(α, β) class,
//! - [`simulation`]: the Monte-Carlo harness (median/MSE curves, paired
//!   boxplot samples, limit-law oracles),
//! - [`io`]: the text, CSV and JSON formats used by the command-line tool.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
mod error;
pub mod io;
pub mod quantile;
pub mod selection;
pub mod simulation;
pub mod tail;

pub use error::{Error, Result};
pub use tail::OrderedSample;
