//! Simulable Weibull tail-distributions with their exact tail metadata.
//!
//! | family        | θ     | b(x)                 | ρ    |
//! |---------------|-------|----------------------|------|
//! | \|N(0,1)\|    | 1/2   | (1/4) log x / x      | -1   |
//! | Γ(α ≠ 1, β)   | 1     | (1 - α) log x / x    | -1   |
//! | W(α, λ)       | 1/α   | 0                    | -∞   |
//! | D(α, β)       | 1/α   | -β x^{-β}            | -β   |
//!
//! Parametrizations: Gamma is shape–rate, Weibull has survival
//! `exp(-(x/λ)^α)`, and D(α, β) has `H^{-1}(x) = x^{1/α} (1 + x^{-β})`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod rng;
pub mod special;

pub use rng::Rng;
pub use special::std_normal_quantile;

use special::Tail;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// |N(0, 1)|.
    AbsNormal,
    Gamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    DClass { alpha: f64, beta: f64 },
}

/// Rate function `b` of the second-order condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RateFunction {
    Zero,
    /// `coef · log x / x`
    LogOverX { coef: f64 },
    /// `coef · x^{-exponent}`
    Power { coef: f64, exponent: f64 },
}

impl RateFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            RateFunction::Zero => 0.0,
            RateFunction::LogOverX { coef } => coef * x.ln() / x,
            RateFunction::Power { coef, exponent } => coef * x.powf(-exponent),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RateFunction::Zero)
    }
}

/// True tail parameters of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailMeta {
    pub theta: f64,
    /// Second-order parameter; `-inf` when `b ≡ 0`.
    pub rho: f64,
    pub b: RateFunction,
    /// `ℓ(x) = 1 + x^{-β}` for the D class; unknown in closed form otherwise.
    pub ell_beta: Option<f64>,
    /// Set when the metadata had to fall back to a neighbouring case.
    pub notice: Option<String>,
}

impl TailMeta {
    /// The slowly varying part `ℓ`, when known in closed form.
    pub fn ell(&self, x: f64) -> Option<f64> {
        self.ell_beta.map(|beta| 1.0 + x.powf(-beta))
    }
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        let valid = match *self {
            DistributionSpec::AbsNormal => true,
            DistributionSpec::Gamma { shape, rate } => ok(shape) && ok(rate),
            DistributionSpec::Weibull { shape, scale } => ok(shape) && ok(scale),
            DistributionSpec::DClass { alpha, beta } => {
                ok(alpha) && ok(beta) && beta < 1.0 && alpha * beta <= 1.0
            }
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidSpec(self.to_string()))
        }
    }

    /// Filesystem-friendly label, e.g. `gamma-0.25-0.25`.
    pub fn label(&self) -> String {
        self.to_string().replace([':', ','], "-")
    }

    pub fn tail_meta(&self) -> TailMeta {
        match *self {
            DistributionSpec::AbsNormal => TailMeta {
                theta: 0.5,
                rho: -1.0,
                b: RateFunction::LogOverX { coef: 0.25 },
                ell_beta: None,
                notice: None,
            },
            DistributionSpec::Gamma { shape: 1.0, .. } => TailMeta {
                theta: 1.0,
                rho: f64::NEG_INFINITY,
                b: RateFunction::Zero,
                ell_beta: None,
                notice: Some(
                    "Gamma with shape 1 is exponential; using Weibull W(1, 1/rate) tail metadata"
                        .to_string(),
                ),
            },
            DistributionSpec::Gamma { shape, .. } => TailMeta {
                theta: 1.0,
                rho: -1.0,
                b: RateFunction::LogOverX { coef: 1.0 - shape },
                ell_beta: None,
                notice: None,
            },
            DistributionSpec::Weibull { shape, .. } => TailMeta {
                theta: 1.0 / shape,
                rho: f64::NEG_INFINITY,
                b: RateFunction::Zero,
                ell_beta: None,
                notice: None,
            },
            DistributionSpec::DClass { alpha, beta } => TailMeta {
                theta: 1.0 / alpha,
                rho: -beta,
                b: RateFunction::Power { coef: -beta, exponent: beta },
                ell_beta: Some(beta),
                notice: None,
            },
        }
    }

    /// `1 - F(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            DistributionSpec::AbsNormal => special::abs_normal_sf(x),
            DistributionSpec::Gamma { shape, rate } => special::gamma_q(shape, rate * x),
            DistributionSpec::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            DistributionSpec::DClass { alpha, beta } => {
                (-special::d_class_hazard(alpha, beta, x)).exp()
            }
        }
    }

    /// `F(x)`, computed without cancellation on the lower side.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            DistributionSpec::AbsNormal => libm::erf(x / std::f64::consts::SQRT_2),
            DistributionSpec::Gamma { shape, rate } => special::gamma_p(shape, rate * x),
            DistributionSpec::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            DistributionSpec::DClass { alpha, beta } => {
                -(-special::d_class_hazard(alpha, beta, x)).exp_m1()
            }
        }
    }

    /// The upper quantile `x_p` with `1 - F(x_p) = p`.
    pub fn true_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("tail probability must be in (0, 1), got {p}")));
        }
        self.validate()?;
        let t = -p.ln();
        Ok(match *self {
            DistributionSpec::AbsNormal => -std_normal_quantile(0.5 * p)?,
            DistributionSpec::Gamma { shape, rate } => {
                special::gamma_quantile_unit(shape, p, Tail::Upper)? / rate
            }
            DistributionSpec::Weibull { shape, scale } => scale * t.powf(1.0 / shape),
            DistributionSpec::DClass { alpha, beta } => d_class_inverse_hazard(alpha, beta, t),
        })
    }

    /// `n` i.i.d. draws by inversion.
    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<Vec<f64>> {
        self.validate()?;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v = match *self {
                DistributionSpec::AbsNormal => -std_normal_quantile(0.5 * rng.uniform())?,
                DistributionSpec::Gamma { shape, rate } => {
                    let u = rng.uniform();
                    // invert whichever tail is smaller; 1 - u is exact for u >= 1/2
                    let x = if u < 0.5 {
                        special::gamma_quantile_unit(shape, u, Tail::Lower)?
                    } else {
                        special::gamma_quantile_unit(shape, 1.0 - u, Tail::Upper)?
                    };
                    x / rate
                }
                DistributionSpec::Weibull { shape, scale } => {
                    scale * rng.exponential().powf(1.0 / shape)
                }
                DistributionSpec::DClass { alpha, beta } => {
                    d_class_inverse_hazard(alpha, beta, rng.exponential())
                }
            };
            out.push(v);
        }
        Ok(out)
    }
}

/// `H^{-1}(x) = x^{1/α} (1 + x^{-β})`.
fn d_class_inverse_hazard(alpha: f64, beta: f64, x: f64) -> f64 {
    x.powf(1.0 / alpha) * (1.0 + x.powf(-beta))
}

/// Free-standing form of [`DistributionSpec::tail_meta`].
pub fn tail_meta(spec: &DistributionSpec) -> TailMeta {
    spec.tail_meta()
}

/// Free-standing form of [`DistributionSpec::true_quantile`].
pub fn true_quantile(spec: &DistributionSpec, p: f64) -> Result<f64> {
    spec.true_quantile(p)
}

/// Free-standing form of [`DistributionSpec::sample`].
pub fn sample(spec: &DistributionSpec, n: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    spec.sample(n, rng)
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::AbsNormal => write!(f, "absnormal"),
            DistributionSpec::Gamma { shape, rate } => write!(f, "gamma:{shape},{rate}"),
            DistributionSpec::Weibull { shape, scale } => write!(f, "weibull:{shape},{scale}"),
            DistributionSpec::DClass { alpha, beta } => write!(f, "dclass:{alpha},{beta}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `absnormal`, `gamma:a,b`, `weibull:a,b` or `dclass:a,b`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(s.to_string());
        let s_trim = s.trim();
        let (name, args) = match s_trim.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (s_trim, None),
        };
        let params = |args: Option<&str>| -> Result<(f64, f64)> {
            let args = args.ok_or_else(bad)?;
            let mut it = args.split(',').map(|a| a.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(bad()),
            }
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "absnormal" if args.is_none() => DistributionSpec::AbsNormal,
            "gamma" => {
                let (shape, rate) = params(args)?;
                DistributionSpec::Gamma { shape, rate }
            }
            "weibull" => {
                let (shape, scale) = params(args)?;
                DistributionSpec::Weibull { shape, scale }
            }
            "dclass" => {
                let (alpha, beta) = params(args)?;
                DistributionSpec::DClass { alpha, beta }
            }
            _ => return Err(bad()),
        };
        spec.validate().map_err(|_| bad())?;
        Ok(spec)
    }
}
