//! Sup-norm experiments over a frequency grid and log-log decay fits.

use crate::multiplier::{self, ModelParams, MultiplierError, MultiplierIndex};
use crate::specfun::SpecFunError;
use crate::Freq;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;
use thiserror::Error;

/// Minimum number of samples accepted by [`fit_decay`].
pub const MIN_FIT_SAMPLES: usize = 8;
/// Minimum ratio `t_max / t_min` accepted by [`fit_decay`].
pub const MIN_FIT_SPAN: f64 = 1e3;
/// Decades by which [`sup_norm`] extends the grid on each side to detect growth.
const EXTENSION_DECADES: f64 = 3.0;
/// Relative growth of the extended sup that flags a symbol as unbounded.
const GROWTH_FACTOR: f64 = 1.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("empty or invalid frequency grid")]
    Grid,
    #[error("need at least {MIN_FIT_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("time span ratio t_max/t_min = {0} is below {MIN_FIT_SPAN}")]
    ShortSpan(f64),
    #[error("sample ({t}, {value}) is not a positive finite value at t >= 0")]
    BadSample { t: f64, value: f64 },
    #[error("degenerate fit: no spread in log(1+t)")]
    Degenerate,
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
}

pub type Result<T> = std::result::Result<T, LabError>;

/// Grid maximum of a symbol at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNormSample {
    pub t: f64,
    pub sup_value: f64,
    pub argmax_r: f64,
    /// Set when extending the grid makes the maximum grow, i.e. the symbol has
    /// no finite sup.
    pub unbounded: bool,
}

impl SupNormSample {
    pub const CSV_HEADER: &'static str = "t,sup_value,argmax_r";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e}",
            self.t, self.sup_value, self.argmax_r
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayModel {
    /// `value = C (1+t)^a`
    Power,
    /// `value = C (1+t)^a log(e+t)`
    PowerLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub log_factor: bool,
    /// Max absolute deviation of `log(value)` from the fitted line.
    pub residual: f64,
    /// Fitted `log C`.
    pub intercept: f64,
    pub samples: usize,
}

impl DecayFit {
    pub fn predict(&self, t: f64) -> f64 {
        let mut v = self.intercept + self.exponent * (1.0 + t).ln();
        if self.log_factor {
            v += (E + t).ln().ln();
        }
        v.exp()
    }
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(LabError::Grid);
    }
    Ok(())
}

/// `(max, argmax)` of `f` over the grid, evaluated in parallel. Ties keep the
/// smallest index so the result is deterministic.
fn grid_max<F>(r_grid: &[f64], f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> std::result::Result<f64, MultiplierError> + Sync,
{
    let values: Vec<f64> = r_grid
        .par_iter()
        .map(|&r| f(r))
        .collect::<std::result::Result<_, _>>()?;
    let (i, v) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    Ok((v, r_grid[i]))
}

fn psi_abs(idx: MultiplierIndex, t: f64, r: f64) -> std::result::Result<f64, MultiplierError> {
    Ok(multiplier::psi(idx, t, Freq::new(r)?)?.im.abs())
}

/// Largest `|Ψ_idx(t, r)|` over the grid, plus an unboundedness probe: the grid is
/// extended by three decades on either side and the sample is flagged when the
/// maximum grows by more than half.
pub fn sup_norm(idx: MultiplierIndex, t: f64, r_grid: &[f64]) -> Result<SupNormSample> {
    check_grid(r_grid)?;
    let (sup_value, argmax_r) = grid_max(r_grid, |r| psi_abs(idx, t, r))?;
    let lo = r_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = r_grid.iter().cloned().fold(0.0, f64::max);
    let scale = 10f64.powf(EXTENSION_DECADES);
    let probe: Vec<f64> = crate::grid::log_space(lo / scale, lo, 64)
        .into_iter()
        .chain(crate::grid::log_space(hi, hi * scale, 64))
        .collect();
    let (ext, _) = grid_max(&probe, |r| match psi_abs(idx, t, r) {
        // values too large to represent are growth, not failure
        Err(MultiplierError::SpecFun(SpecFunError::Overflow { .. })) => Ok(f64::INFINITY),
        other => other,
    })?;
    Ok(SupNormSample {
        t,
        sup_value,
        argmax_r,
        unbounded: ext > GROWTH_FACTOR * sup_value,
    })
}

/// Largest spectral norm of the energy symbol over the grid.
pub fn operator_norm(p: &ModelParams, t: f64, r_grid: &[f64]) -> Result<SupNormSample> {
    check_grid(r_grid)?;
    let (sup_value, argmax_r) = grid_max(r_grid, |r| {
        Ok(multiplier::energy_symbol(p, t, Freq::new(r)?)?.spectral_norm())
    })?;
    Ok(SupNormSample {
        t,
        sup_value,
        argmax_r,
        unbounded: false,
    })
}

/// Least-squares slope of `log(value)` against `log(1+t)`; with
/// [`DecayModel::PowerLog`] the known factor `log(e+t)` is divided out first.
pub fn fit_decay(samples: &[(f64, f64)], model: DecayModel) -> Result<DecayFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(LabError::TooFewSamples(samples.len()));
    }
    for &(t, value) in samples {
        if !(t >= 0.0 && t.is_finite() && value > 0.0 && value.is_finite()) {
            return Err(LabError::BadSample { t, value });
        }
    }
    let log_factor = model == DecayModel::PowerLog;
    let xs: Vec<f64> = samples.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = samples
        .iter()
        .map(|&(t, v)| {
            let y = v.ln();
            if log_factor {
                y - (E + t).ln().ln()
            } else {
                y
            }
        })
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 * n {
        return Err(LabError::Degenerate);
    }
    // span over the positive times; t = 0 carries no scale of its own
    let t_min = samples
        .iter()
        .map(|s| s.0)
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let span = t_max / t_min;
    if span < MIN_FIT_SPAN * (1.0 - 1e-9) {
        return Err(LabError::ShortSpan(span));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        exponent,
        log_factor,
        residual,
        intercept,
        samples: samples.len(),
    })
}

/// `max / min` of `value / rate(t)` over the samples, with `rate = (1+t)^a`
/// (times `log(e+t)` when requested). Two-sided comparability means this stays
/// bounded.
pub fn comparability_ratio(samples: &[(f64, f64)], exponent: f64, log_factor: bool) -> f64 {
    let normalized = samples.iter().map(|&(t, v)| {
        let mut rate = (1.0 + t).powf(exponent);
        if log_factor {
            rate *= (E + t).ln();
        }
        v / rate
    });
    let (lo, hi) = normalized.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    hi / lo
}

/// The exponent predicted for `sup_r |Ψ_idx(t, r)|` at large `t`.
pub fn predicted_psi_exponent(idx: &MultiplierIndex) -> f64 {
    if idx.rho == 0.0 {
        -idx.k
    } else {
        (idx.rho.abs() - idx.k).max(-0.5)
    }
}

/// The exponent predicted for the operator norm of the energy symbol.
pub fn predicted_operator_exponent(p: &ModelParams) -> f64 {
    -(1.0 + p.kappa()).min(p.mu() / 2.0)
}

/// Sup-norm samples at each time of `times`.
pub fn sup_norm_series(
    idx: MultiplierIndex,
    times: &[f64],
    r_grid: &[f64],
) -> Result<Vec<SupNormSample>> {
    times.iter().map(|&t| sup_norm(idx, t, r_grid)).collect()
}

pub fn operator_norm_series(
    p: &ModelParams,
    times: &[f64],
    r_grid: &[f64],
) -> Result<Vec<SupNormSample>> {
    times.iter().map(|&t| operator_norm(p, t, r_grid)).collect()
}

/// `(t, sup_value)` pairs ready for [`fit_decay`].
pub fn fit_points(samples: &[SupNormSample]) -> Vec<(f64, f64)> {
    samples.iter().map(|s| (s.t, s.sup_value)).collect()
}
