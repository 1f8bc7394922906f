//! Gamma-function helpers needed by the Bessel evaluators.

#![allow(clippy::excessive_precision)]

use super::trig::sin_pi;
use std::f64::consts::PI;

/// Taylor coefficients of `1/Γ(z) = Σ_{k≥1} c_k z^k` about `z = 0`.
///
/// `RGAMMA_TAYLOR[j]` is `c_{j+1}`, so `1/Γ(1+x) = Σ_j RGAMMA_TAYLOR[j] x^j`.
const RGAMMA_TAYLOR: [f64; 29] = [
    1.0,
    0.577_215_664_901_532_860_6,
    -0.655_878_071_520_253_881_1,
    -0.042_002_635_034_095_235_53,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_75,
    -0.009_621_971_527_876_973_562,
    0.007_218_943_246_663_099_542,
    -0.001_165_167_591_859_065_112,
    -0.000_215_241_674_114_950_972_8,
    0.000_128_050_282_388_116_186_2,
    -0.000_020_134_854_780_788_238_66,
    -0.000_001_250_493_482_142_670_657,
    0.000_001_133_027_231_981_695_882,
    -2.056_338_416_977_607_103e-7,
    6.116_095_104_481_415_818e-9,
    5.002_007_644_469_222_930e-9,
    -1.181_274_570_487_020_145e-9,
    1.043_426_711_691_100_510e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783e-14,
    -5.348_122_539_423_017_982e-15,
    1.226_778_628_238_260_790e-15,
    -1.181_259_301_697_458_770e-16,
    1.186_692_254_751_600_333e-18,
    1.412_380_655_318_031_782e-18,
    -2.298_745_684_435_370_207e-19,
];

/// The four Temme auxiliary quantities for `|mu| <= 1/2`:
/// `gam1 = (1/Γ(1-mu) - 1/Γ(1+mu)) / (2 mu)`, `gam2 = (1/Γ(1-mu) + 1/Γ(1+mu)) / 2`,
/// `gampl = 1/Γ(1+mu)` and `gammi = 1/Γ(1-mu)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TemmeGammas {
    pub gam1: f64,
    pub gam2: f64,
    pub gampl: f64,
    pub gammi: f64,
}

pub(crate) fn temme_gammas(mu: f64) -> TemmeGammas {
    debug_assert!(mu.abs() <= 0.5 + 1e-12);
    // gam2 = Σ c_{2i+1} mu^{2i}, gam1 = -Σ c_{2i+2} mu^{2i}: both are even in mu,
    // so no division by mu is needed.
    let x2 = mu * mu;
    let mut gam2 = 0.0;
    let mut gam1 = 0.0;
    for j in (0..RGAMMA_TAYLOR.len()).rev() {
        if j % 2 == 0 {
            gam2 = gam2 * x2 + RGAMMA_TAYLOR[j];
        } else {
            gam1 = gam1 * x2 + RGAMMA_TAYLOR[j];
        }
    }
    let gam1 = -gam1;
    TemmeGammas {
        gam1,
        gam2,
        gampl: gam2 - mu * gam1,
        gammi: gam2 + mu * gam1,
    }
}

/// Above this the Lanczos approximation from `statrs` is used; below it the
/// Taylor series of `1/Γ(1+x)` and the recurrence, which are accurate to a few ulp.
const TAYLOR_RECURRENCE_MAX: f64 = 60.0;

/// `1/Γ(x)` for `0.5 <= x <= TAYLOR_RECURRENCE_MAX`.
fn rgamma_recurrence(x: f64) -> f64 {
    let mut y = x;
    let mut scale = 1.0;
    while y >= 1.5 {
        y -= 1.0;
        scale *= y;
    }
    let h = y - 1.0;
    let series = RGAMMA_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * h + c);
    series / scale
}

/// `Γ(x)` for real `x`; poles return `inf`.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        PI / (sin_pi(x) * gamma(1.0 - x))
    } else if x <= TAYLOR_RECURRENCE_MAX {
        1.0 / rgamma_recurrence(x)
    } else {
        statrs::function::gamma::gamma(x)
    }
}

/// Reciprocal gamma `1/Γ(x)`, an entire function: exactly zero at `0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // sin_pi reduces its argument exactly, which keeps relative accuracy
        // right next to the poles.
        sin_pi(x) / (PI * rgamma(1.0 - x))
    } else if x <= TAYLOR_RECURRENCE_MAX {
        rgamma_recurrence(x)
    } else if x > 171.0 {
        0.0
    } else {
        1.0 / statrs::function::gamma::gamma(x)
    }
}
