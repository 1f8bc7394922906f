//! Direct numerical integration of the single-mode equation
//! `v'' + mu/(1+t) v' + r^2 v = 0`, independent of any Bessel-function code.

mod dop853;

pub use dop853::StepStats;

use crate::mat2::Mat2;
use crate::multiplier::ModelParams;
use dop853::Failure;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
/// Largest admissible `r * t_end` (number of radians of phase to resolve).
pub const PHASE_BUDGET: f64 = 1e7;
/// The per-step tolerance is never pushed below this; round-off dominates beyond.
const LOCAL_TOL_FLOOR: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("tolerance {0} outside [{MIN_TOL}, {MAX_TOL}]")]
    Tolerance(f64),
    #[error("invalid end time {0}")]
    EndTime(f64),
    #[error("invalid frequency {0}")]
    Frequency(f64),
    #[error("invalid initial data ({v0}, {vdot0})")]
    InitialData { v0: f64, vdot0: f64 },
    #[error("r * t_end = {0} exceeds the phase budget {PHASE_BUDGET}")]
    PhaseBudget(f64),
    #[error("step size underflow at t = {t_reached}")]
    StepSizeUnderflow { t_reached: f64 },
    #[error("step limit reached at t = {t_reached}")]
    TooManySteps { t_reached: f64 },
    #[error("solution became non-finite near t = {t_reached}")]
    NonFinite { t_reached: f64 },
}

impl From<Failure> for OracleError {
    fn from(f: Failure) -> Self {
        match f {
            Failure::StepSizeUnderflow { t } => OracleError::StepSizeUnderflow { t_reached: t },
            Failure::TooManySteps { t } => OracleError::TooManySteps { t_reached: t },
            Failure::NonFinite { t } => OracleError::NonFinite { t_reached: t },
        }
    }
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Mode amplitude and velocity at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub t: f64,
    pub v: f64,
    pub vdot: f64,
}

impl ModeState {
    /// `(r^2 v^2 + vdot^2) / 2`, non-increasing in `t`.
    pub fn energy(&self, r: f64) -> f64 {
        0.5 * (r * r * self.v * self.v + self.vdot * self.vdot)
    }
}

fn check(r: f64, t_end: f64, tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(OracleError::Tolerance(tol));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(OracleError::EndTime(t_end));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(OracleError::Frequency(r));
    }
    if r * t_end > PHASE_BUDGET {
        return Err(OracleError::PhaseBudget(r * t_end));
    }
    Ok(())
}

/// Per-step tolerance: the requested global tolerance spread over the number of
/// oscillation periods, since phase errors accumulate roughly linearly.
fn local_tol(r: f64, t_end: f64, tol: f64) -> f64 {
    (0.1 * tol / (1.0 + r * t_end / TAU)).max(LOCAL_TOL_FLOOR)
}

fn initial_step(r: f64, mu: f64) -> f64 {
    0.05 / (1.0 + r + mu)
}

/// Integrates from `(v, v')(0) = (v0, vdot0)` to `t_end`.
pub fn integrate_mode(
    p: &ModelParams,
    r: f64,
    v0: f64,
    vdot0: f64,
    t_end: f64,
    tol: f64,
) -> Result<ModeState> {
    integrate_mode_with_stats(p, r, v0, vdot0, t_end, tol).map(|(s, _)| s)
}

pub fn integrate_mode_with_stats(
    p: &ModelParams,
    r: f64,
    v0: f64,
    vdot0: f64,
    t_end: f64,
    tol: f64,
) -> Result<(ModeState, StepStats)> {
    check(r, t_end, tol)?;
    if !(v0.is_finite() && vdot0.is_finite()) {
        return Err(OracleError::InitialData { v0, vdot0 });
    }
    let mu = p.mu();
    let r2 = r * r;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], -r2 * y[0] - mu / (1.0 + t) * y[1]];
    let (y, stats) = dop853::integrate(
        rhs,
        0.0,
        [v0, vdot0],
        t_end,
        local_tol(r, t_end, tol),
        initial_step(r, mu),
    )?;
    Ok((
        ModeState {
            t: t_end,
            v: y[0],
            vdot: y[1],
        },
        stats,
    ))
}

/// Propagator of the energy variables `(r v, v')`: column `j` is the state at
/// `t_end` reached from the `j`-th unit vector. The system
/// `w' = r v'`, `v'' = -r w - mu/(1+t) v'` with `w = r v` is regular at `r = 0`.
/// Its determinant is `(1+t)^(-mu)` by Liouville's formula.
pub fn fundamental_matrix(p: &ModelParams, r: f64, t_end: f64, tol: f64) -> Result<Mat2> {
    check(r, t_end, tol)?;
    let mu = p.mu();
    let rhs = |t: f64, y: &[f64; 2]| [r * y[1], -r * y[0] - mu / (1.0 + t) * y[1]];
    let rtol = local_tol(r, t_end, tol);
    let h0 = initial_step(r, mu);
    let (c1, _) = dop853::integrate(rhs, 0.0, [1.0, 0.0], t_end, rtol, h0)?;
    let (c2, _) = dop853::integrate(rhs, 0.0, [0.0, 1.0], t_end, rtol, h0)?;
    Ok(Mat2::from_columns(c1, c2))
}

/// Closed form at `r = 0`.
pub fn zero_frequency_state(p: &ModelParams, v0: f64, vdot0: f64, t: f64) -> ModeState {
    let mu = p.mu();
    let s = 1.0 + t;
    ModeState {
        t,
        v: v0 + vdot0 * (s.powf(1.0 - mu) - 1.0) / (1.0 - mu),
        vdot: vdot0 * s.powf(-mu),
    }
}

/// Sign changes of `v` sampled on `n` equally spaced points of `[0, t_end]`.
pub fn count_sign_changes(
    p: &ModelParams,
    r: f64,
    v0: f64,
    vdot0: f64,
    t_end: f64,
    samples: usize,
    tol: f64,
) -> Result<usize> {
    check(r, t_end, tol)?;
    let mu = p.mu();
    let r2 = r * r;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], -r2 * y[0] - mu / (1.0 + t) * y[1]];
    let rtol = local_tol(r, t_end, tol);
    let dt = t_end / samples as f64;
    let mut y = [v0, vdot0];
    let mut prev_sign = 0.0;
    let mut changes = 0;
    for i in 0..samples {
        let t0 = i as f64 * dt;
        let (next, _) = dop853::integrate(rhs, t0, y, t0 + dt, rtol, dt.min(initial_step(r, mu)))?;
        y = next;
        if y[0] != 0.0 {
            let sign = y[0].signum();
            if prev_sign != 0.0 && sign != prev_sign {
                changes += 1;
            }
            prev_sign = sign;
        }
    }
    Ok(changes)
}
