//! Special functions behind the samplers and quantile oracles.

// AS 241 coefficients are kept exactly as published.
#![allow(clippy::excessive_precision)]

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::{Error, Result};

/// Φ^{-1}(q), Wichura's AS 241 (PPND16), about 1e-16 relative accuracy.
pub fn std_normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("normal quantile needs 0 < q < 1, got {q}")));
    }
    Ok(ppnd16(q))
}

const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_545_925,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `P(|Z| > x)` for standard normal `Z`.
pub fn abs_normal_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        libm::erfc(x / std::f64::consts::SQRT_2)
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(a, x)
    }
}

/// Which tail probability a gamma inversion is matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Lower,
    Upper,
}

/// Solves `P(a, x) = prob` (lower) or `Q(a, x) = prob` (upper) for the unit-rate gamma.
///
/// Works on `t = log x` and matches log-probabilities, so very small tail
/// probabilities keep their relative precision. Newton steps are used while
/// they stay inside the current bracket, bisection otherwise; the result is
/// accurate to about 1e-13 relative.
pub fn gamma_quantile_unit(a: f64, prob: f64, tail: Tail) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("gamma shape must be positive, got {a}")));
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!("gamma quantile needs 0 < p < 1, got {prob}")));
    }
    let target = prob.ln();
    let lg = ln_gamma(a);
    // g is increasing in t for both tails
    let g = |t: f64| -> f64 {
        let x = t.exp();
        match tail {
            Tail::Lower => gamma_p(a, x).ln() - target,
            Tail::Upper => target - gamma_q(a, x).ln(),
        }
    };
    let dg = |t: f64| -> f64 {
        let x = t.exp();
        // x * density / tail probability
        let log_xf = a * t - x - lg;
        match tail {
            Tail::Lower => (log_xf - gamma_p(a, x).ln()).exp(),
            Tail::Upper => (log_xf - gamma_q(a, x).ln()).exp(),
        }
    };

    let mut t = initial_guess(a, prob, tail).ln();
    let mut lo = t;
    let mut hi = t;
    let mut step = 1.0;
    if g(t) < 0.0 {
        while g(hi) < 0.0 {
            lo = hi;
            hi += step;
            step *= 2.0;
        }
    } else {
        while g(lo) > 0.0 {
            hi = lo;
            lo -= step;
            step *= 2.0;
            if lo < -745.0 {
                return Ok(f64::MIN_POSITIVE);
            }
        }
    }
    t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gt = g(t);
        if gt == 0.0 {
            break;
        }
        if gt < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = dg(t);
        let mut next = t - gt / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let moved = (next - t).abs();
        t = next;
        if moved < 1e-14 * t.abs().max(1.0) || hi - lo < 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    Ok(t.exp())
}

fn initial_guess(a: f64, prob: f64, tail: Tail) -> f64 {
    let lower = match tail {
        Tail::Lower => prob,
        Tail::Upper => 1.0 - prob,
    };
    // small-x expansion P(a, x) ~ x^a / Γ(a + 1)
    if a < 1.0 && lower < 0.5 {
        let x = ((lower.ln() + ln_gamma(a + 1.0)) / a).exp();
        if x > 0.0 && x.is_finite() {
            return x;
        }
    }
    // Wilson–Hilferty
    let z = match tail {
        Tail::Lower => ppnd16(prob),
        Tail::Upper => -ppnd16(prob),
    };
    let c = 1.0 / (9.0 * a);
    let x = a * (1.0 - c + z * c.sqrt()).powi(3);
    if x > 0.0 && x.is_finite() {
        x
    } else {
        a.max(1e-3)
    }
}

/// Inverse of `y ↦ y^{1/α} (1 + y^{-β})` on `y > 0`, the cumulative hazard of the D(α, β) class.
///
/// Returns 0 below the support (possible only when `αβ = 1`).
pub fn d_class_hazard(alpha: f64, beta: f64, x: f64) -> f64 {
    let e1 = 1.0 / alpha;
    let e2 = e1 - beta;
    if e2 <= 0.0 && x <= 1.0 {
        return 0.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    let target = x.ln();
    // log of H^{-1}(e^s), increasing in s
    let g = |s: f64| -> f64 {
        let (u, v) = (e1 * s, e2 * s);
        let m = u.max(v);
        m + ((u - m).exp() + (v - m).exp()).ln() - target
    };
    let dg = |s: f64| -> f64 {
        let (u, v) = (e1 * s, e2 * s);
        let m = u.max(v);
        let (wu, wv) = ((u - m).exp(), (v - m).exp());
        (e1 * wu + e2 * wv) / (wu + wv)
    };
    let mut s = alpha * target;
    let (mut lo, mut hi) = (s, s);
    let mut step = 1.0;
    if g(s) < 0.0 {
        while g(hi) < 0.0 {
            lo = hi;
            hi += step;
            step *= 2.0;
        }
    } else {
        while g(lo) > 0.0 {
            hi = lo;
            lo -= step;
            step *= 2.0;
            if lo < -745.0 {
                return 0.0;
            }
        }
    }
    s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gs = g(s);
        if gs == 0.0 {
            break;
        }
        if gs < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let mut next = s - gs / dg(s);
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let moved = (next - s).abs();
        s = next;
        if moved < 1e-15 * s.abs().max(1.0) || hi - lo < 1e-15 * s.abs().max(1.0) {
            break;
        }
    }
    s.exp()
}
