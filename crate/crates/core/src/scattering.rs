//! Modified scattering: the free rotation `E0(t)`, the finite-time approximant
//! `W(t) = (1+t)^(mu/2) E0(-t) E(t)` of the energy symbol at `kappa = (mu-2)/2`,
//! and its limit `Z+`.
//!
//! With `lambda = (mu-1)/2` and `alpha = r - lambda pi/2 - pi/4`, the limit is
//!
//! ```text
//! Z+ = sqrt(pi r / 2) [[ [r]^(1+k) (J_{l+1} sin a - Y_{l+1} cos a),  [r]^k (J_l sin a - Y_l cos a) ],
//!                      [ [r]^(1+k) (J_{l+1} cos a + Y_{l+1} sin a),  [r]^k (J_l cos a + Y_l sin a) ]]
//! ```
//!
//! with all Bessel functions at `r`. Only nonnegative orders appear, so integer
//! `rho` needs nothing special, and for small `r` the scaled functions make the
//! powers of `r` cancel exactly.

use crate::energy_lab::{self, EnergyError, QuadratureConfig, RadialData};
use crate::grid::log_space;
use crate::mat2::Mat2;
use crate::multiplier::{self, bracket, ModelParams, MultiplierError};
use crate::specfun::{self, sin_cos_pi};
use crate::supnorm_lab::{self, DecayFit, DecayModel, LabError};
use crate::Freq;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Below this frequency `Z+` is assembled from the scaled Bessel functions.
const SCALED_FORM_MAX_R: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("scattering needs kappa = (mu-2)/2, got kappa = {kappa} for mu = {mu}")]
    NotLimitCase { mu: f64, kappa: f64 },
    #[error("the printed first-entry form needs non-integer rho, got {0}")]
    IntegerRho(f64),
    #[error("invalid frequency window [{0}, {1}]")]
    Window(f64, f64),
    #[error("empty frequency grid")]
    EmptyGrid,
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Fit(#[from] LabError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

impl From<specfun::SpecFunError> for ScatteringError {
    fn from(e: specfun::SpecFunError) -> Self {
        ScatteringError::Multiplier(e.into())
    }
}

pub type Result<T> = std::result::Result<T, ScatteringError>;

/// Which closed form to use for the `(1,1)` entry of `Z+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZPlusForm {
    /// Sign-audited form, consistent with the `t -> infinity` limit.
    #[default]
    Audited,
    /// The `(1,1)` entry with a minus between the two `csc` terms; wrong, kept
    /// so that the audit can be shown to catch it. Needs non-integer `rho`.
    MinusM11,
}

/// Rotation `[[cos tr, sin tr], [-sin tr, cos tr]]` of free waves in the energy
/// variables.
pub fn free_evolution(t: f64, f: Freq) -> Mat2 {
    let (s, c) = (t * f.r()).sin_cos();
    Mat2::new(c, s, -s, c)
}

fn require_limit_case(p: &ModelParams) -> Result<()> {
    if !p.is_limit_case() {
        return Err(ScatteringError::NotLimitCase {
            mu: p.mu(),
            kappa: p.kappa(),
        });
    }
    Ok(())
}

/// `(1+t)^(mu/2) E0(-t) E(t)`.
pub fn wave_operator_approx(p: &ModelParams, t: f64, f: Freq) -> Result<Mat2> {
    require_limit_case(p)?;
    let e = multiplier::energy_symbol(p, t, f)?;
    let back = free_evolution(t, f).transpose();
    Ok((back * e).scale((1.0 + t).powf(0.5 * p.mu())))
}

/// `(sin alpha, cos alpha)` with `alpha = r - (lambda/2 + 1/4) pi`, without
/// rounding the large `r` into the phase.
fn phase(lambda: f64, r: f64) -> (f64, f64) {
    let (sr, cr) = r.sin_cos();
    let (sc, cc) = sin_cos_pi(0.5 * lambda + 0.25);
    (sr * cc - cr * sc, cr * cc + sr * sc)
}

/// The limit symbol `Z+(r)`; continuous down to `r = 0`.
pub fn z_plus(p: &ModelParams, f: Freq) -> Result<Mat2> {
    z_plus_with(p, f, ZPlusForm::Audited)
}

pub fn z_plus_with(p: &ModelParams, f: Freq, form: ZPlusForm) -> Result<Mat2> {
    require_limit_case(p)?;
    let lam = p.order();
    let kappa = p.kappa();
    let r = f.r();
    let (sa, ca) = phase(lam, r);
    let amp = FRAC_PI_2.sqrt();
    let mut z = if r < SCALED_FORM_MAX_R {
        // sqrt(r) [r]^(1+kappa) = r^(lam+1) <r>^-(1+kappa), sqrt(r) [r]^kappa = r^lam <r>^-kappa
        let [l0, l1, y0, y1] = specfun::scaled_pair(lam, r)?;
        let ang = f.angle();
        let w1 = amp * ang.powf(-1.0 - kappa);
        let w0 = amp * ang.powf(-kappa);
        let j1 = r.powf(2.0 * lam + 2.0) * l1;
        let j0 = r.powf(2.0 * lam) * l0;
        Mat2::new(
            w1 * (j1 * sa - y1 * ca),
            w0 * (j0 * sa - y0 * ca),
            w1 * (j1 * ca + y1 * sa),
            w0 * (j0 * ca + y0 * sa),
        )
    } else {
        let pair = specfun::bessel_jy_pair(lam, r)?;
        let b = bracket(r);
        let w1 = amp * r.sqrt() * b.powf(1.0 + kappa);
        let w0 = amp * r.sqrt() * b.powf(kappa);
        Mat2::new(
            w1 * (pair.j_next * sa - pair.y_next * ca),
            w0 * (pair.j * sa - pair.y * ca),
            w1 * (pair.j_next * ca + pair.y_next * sa),
            w0 * (pair.j * ca + pair.y * sa),
        )
    };
    if form == ZPlusForm::MinusM11 {
        z.e11 = minus_m11(p, r)?;
    }
    Ok(z)
}

/// `det Z+(r)`, from the factorization `Z+ = sqrt(pi r/2) R(alpha) B D` with the
/// rotation `R`, the Bessel block `B = [[J_{l+1}, J_l], [Y_{l+1}, Y_l]]` and
/// `D = diag([r]^(1+k), [r]^k)`. For small `r` the determinant is far below the
/// size of the entries, and expanding it from the entries loses all digits.
pub fn z_plus_det(p: &ModelParams, f: Freq) -> Result<f64> {
    require_limit_case(p)?;
    let lam = p.order();
    let r = f.r();
    // r (J_{l+1} Y_l - J_l Y_{l+1})
    let cross = if r < SCALED_FORM_MAX_R {
        let [l0, l1, y0, y1] = specfun::scaled_pair(lam, r)?;
        l1 * y0 * r * r - l0 * y1
    } else {
        let pair = specfun::bessel_jy_pair(lam, r)?;
        r * (pair.j_next * pair.y - pair.j * pair.y_next)
    };
    Ok(FRAC_PI_2 * cross * f.bracket().powf(1.0 + 2.0 * p.kappa()))
}

/// Smallest singular value of `Z+(r)`, through [`z_plus_det`].
pub fn z_plus_min_singular_value(p: &ModelParams, f: Freq) -> Result<f64> {
    Ok(z_plus_det(p, f)?.abs() / z_plus(p, f)?.spectral_norm())
}

/// `sqrt(pi/2) csc(rho pi) [r]^(1+k) sqrt(r) (cos(r - rho pi/2 - pi/4) J_{1-rho}(r) - cos(r + rho pi/2 - pi/4) J_{rho-1}(r))`.
fn minus_m11(p: &ModelParams, r: f64) -> Result<f64> {
    let rho = p.rho();
    if rho == rho.round() {
        return Err(ScatteringError::IntegerRho(rho));
    }
    let csc = 1.0 / (rho * PI).sin();
    let plus = specfun::bessel_j(1.0 - rho, r)?.value;
    let minus = specfun::bessel_j(rho - 1.0, r)?.value;
    let c1 = (r - 0.5 * rho * PI - 0.25 * PI).cos();
    let c2 = (r + 0.5 * rho * PI - 0.25 * PI).cos();
    Ok(FRAC_PI_2.sqrt()
        * csc
        * bracket(r).powf(1.0 + p.kappa())
        * r.sqrt()
        * (c1 * plus - c2 * minus))
}

/// One row of a convergence profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationSample {
    pub t: f64,
    /// `sup_r ||W(t, r) - Z+(r)||` over the window.
    pub deviation: f64,
    pub argmax_r: f64,
}

impl DeviationSample {
    pub const CSV_HEADER: &'static str = "t,deviation,argmax_r";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e}",
            self.t, self.deviation, self.argmax_r
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceProfile {
    pub samples: Vec<DeviationSample>,
    pub fit: DecayFit,
}

/// Number of log-spaced frequencies used on the window by [`convergence_profile`].
pub const WINDOW_POINTS: usize = 400;

/// Largest `||W(t) - Z+||` over `WINDOW_POINTS` log-spaced frequencies in `[c, big_r]`.
pub fn max_deviation(p: &ModelParams, t: f64, c: f64, big_r: f64) -> Result<DeviationSample> {
    if !(c > 0.0 && big_r >= c && big_r.is_finite()) {
        return Err(ScatteringError::Window(c, big_r));
    }
    max_deviation_on(p, t, &log_space(c, big_r, WINDOW_POINTS))
}

/// Largest `||W(t) - Z+||` over an explicit frequency grid.
pub fn max_deviation_on(p: &ModelParams, t: f64, grid: &[f64]) -> Result<DeviationSample> {
    if grid.is_empty() {
        return Err(ScatteringError::EmptyGrid);
    }
    let devs = grid
        .par_iter()
        .map(|&r| {
            let f = Freq::new(r)?;
            Ok((wave_operator_approx(p, t, f)? - z_plus(p, f)?).spectral_norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (i, deviation) =
        devs.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    Ok(DeviationSample {
        t,
        deviation,
        argmax_r: grid[i],
    })
}

/// Deviation samples over `t_grid` and their power-law fit.
pub fn convergence_profile(
    p: &ModelParams,
    window: (f64, f64),
    t_grid: &[f64],
) -> Result<ConvergenceProfile> {
    let samples = t_grid
        .iter()
        .map(|&t| max_deviation(p, t, window.0, window.1))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.deviation)).collect();
    let fit = supnorm_lab::fit_decay(&pts, DecayModel::Power)?;
    Ok(ConvergenceProfile { samples, fit })
}

/// `1/2 ∫ |(W(t) - Z+) [r]^-kappa (g1, g2)|^2 ω_n r^(n-1) dr`, the squared
/// distance between the rescaled solution and its free-wave limit in energy
/// space. Needs data supported away from the origin.
pub fn strong_deviation(
    p: &ModelParams,
    data: &RadialData,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    require_limit_case(p)?;
    let kappa = p.kappa();
    let sample = energy_lab::energy_with(data, t, cfg, |r| {
        let f = Freq::new(r)?;
        let d =
            wave_operator_approx(p, t, f).map_err(to_energy)? - z_plus(p, f).map_err(to_energy)?;
        // energy_with feeds ([r] g1, g2); the symbols act on [r]^-kappa (g1, g2)
        let b = bracket(r);
        Ok(d * Mat2::diag(b.powf(-1.0 - kappa), b.powf(-kappa)))
    })?;
    Ok(sample.energy)
}

fn to_energy(e: ScatteringError) -> EnergyError {
    match e {
        ScatteringError::Multiplier(m) => EnergyError::Multiplier(m),
        ScatteringError::Energy(e) => e,
        other => EnergyError::Profile(other.to_string()),
    }
}
