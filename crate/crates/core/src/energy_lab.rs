//! Energy of radial data under the damped evolution, by Gauss–Legendre
//! quadrature in the radial frequency:
//! `E(t) = 1/2 ∫ |M(t,r) ([r] g1(r), g2(r))|^2 ω_n r^(n-1) dr`,
//! where `g1 = <r> û₁`, `g2 = û₂` and `M` is the propagator of `(r û, û_t)`.
//! Norms are frequency-side; the Plancherel constant is left out.

use crate::mat2::Mat2;
use crate::multiplier::{self, bracket, ModelParams, MultiplierError};
use crate::specfun::gamma;
use crate::supnorm_lab::{self, comparability_ratio, DecayFit, DecayModel, LabError};
use crate::Freq;
use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use thiserror::Error;

/// Gaussian profiles are cut off this many widths past the centre.
const GAUSSIAN_CUTOFF_WIDTHS: f64 = 12.0;
/// Breakpoint separating the linear panel at the origin from the log-spaced ones.
const ORIGIN_PANEL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("profiles disagree on the dimension ({0} vs {1})")]
    DimensionMismatch(u32, u32),
    #[error("data has zero norm")]
    ZeroData,
    #[error("quadrature did not converge: relative change {achieved:e} after {panels} panels")]
    NoConvergence { achieved: f64, panels: usize },
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Fit(#[from] LabError),
}

pub type Result<T> = std::result::Result<T, EnergyError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// `exp(-((r - center)/width)^2)`
    Gaussian { center: f64, width: f64 },
    /// Smooth bump supported on `[inner, outer]` with `inner > 0`.
    Annulus { inner: f64, outer: f64 },
    /// Identically zero.
    Zero,
}

/// Radial frequency-side data component in dimension `n`, optionally weighted by
/// `[r]^kappa` so that it vanishes at the origin to order `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    dimension: u32,
    kind: ProfileKind,
    kappa: f64,
    amplitude: f64,
}

impl RadialProfile {
    pub fn gaussian(dimension: u32, center: f64, width: f64) -> Result<Self> {
        if !(center >= 0.0 && center.is_finite() && width > 0.0 && width.is_finite()) {
            return Err(EnergyError::Profile(format!(
                "gaussian center {center} width {width}"
            )));
        }
        Self::build(dimension, ProfileKind::Gaussian { center, width })
    }

    pub fn annulus(dimension: u32, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(EnergyError::Profile(format!("annulus [{inner}, {outer}]")));
        }
        Self::build(dimension, ProfileKind::Annulus { inner, outer })
    }

    pub fn zero(dimension: u32) -> Result<Self> {
        Self::build(dimension, ProfileKind::Zero)
    }

    fn build(dimension: u32, kind: ProfileKind) -> Result<Self> {
        if dimension == 0 {
            return Err(EnergyError::Profile("dimension must be at least 1".into()));
        }
        Ok(Self {
            dimension,
            kind,
            kappa: 0.0,
            amplitude: 1.0,
        })
    }

    /// The same profile multiplied by `[r]^kappa`.
    pub fn kappa_weighted(self, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(EnergyError::Profile(format!("kappa {kappa}")));
        }
        Ok(Self { kappa, ..self })
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..self
        }
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eval(&self, r: f64) -> f64 {
        let base = match self.kind {
            ProfileKind::Gaussian { center, width } => (-((r - center) / width).powi(2)).exp(),
            ProfileKind::Annulus { inner, outer } => {
                if r <= inner || r >= outer {
                    0.0
                } else {
                    // x in (-1, 1); e * exp(-1/(1-x^2)) peaks at 1
                    let x = (2.0 * r - inner - outer) / (outer - inner);
                    (1.0 - 1.0 / (1.0 - x * x)).exp()
                }
            }
            ProfileKind::Zero => 0.0,
        };
        if self.kappa > 0.0 {
            self.amplitude * bracket(r).powf(self.kappa) * base
        } else {
            self.amplitude * base
        }
    }

    /// Interval outside of which the profile is (numerically) zero; `None` for the zero profile.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.kind {
            ProfileKind::Gaussian { center, width } => Some((
                0.0_f64.max(center - GAUSSIAN_CUTOFF_WIDTHS * width),
                center + GAUSSIAN_CUTOFF_WIDTHS * width,
            )),
            ProfileKind::Annulus { inner, outer } => Some((inner, outer)),
            ProfileKind::Zero => None,
        }
    }
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * PI.powf(h) / gamma(h)
}

/// The pair `(<D> u₁, u₂)` on the frequency side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialData {
    pub first: RadialProfile,
    pub second: RadialProfile,
}

impl RadialData {
    pub fn new(first: RadialProfile, second: RadialProfile) -> Result<Self> {
        if first.dimension != second.dimension {
            return Err(EnergyError::DimensionMismatch(
                first.dimension,
                second.dimension,
            ));
        }
        Ok(Self { first, second })
    }

    pub fn dimension(&self) -> u32 {
        self.first.dimension
    }

    /// Vanishing order at the origin shared by both components.
    pub fn kappa(&self) -> f64 {
        [self.first, self.second]
            .iter()
            .filter(|p| p.kind != ProfileKind::Zero)
            .map(|p| p.kappa)
            .reduce(f64::min)
            .unwrap_or(0.0)
    }

    fn support(&self) -> Option<(f64, f64)> {
        match (self.first.support(), self.second.support()) {
            (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
            (a, b) => a.or(b),
        }
    }

    /// `(||g1||^2, ||g2||^2)` with respect to `ω_n r^(n-1) dr`, each divided by
    /// `[r]^(2 kappa)` first.
    pub fn weighted_norms_sq(&self, kappa: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        let n = self.dimension();
        let f = |r: f64| {
            let w = bracket(r).powf(-2.0 * kappa);
            let (a, b) = (self.first.eval(r), self.second.eval(r));
            let m = sphere_area(n) * r.powi(n as i32 - 1);
            if a == 0.0 && b == 0.0 {
                [0.0, 0.0]
            } else {
                [w * a * a * m, w * b * b * m]
            }
        };
        let v = adaptive_quadrature(self.support(), 0.0, cfg, |r| Ok(f(r)))?;
        Ok((v[0], v[1]))
    }

    /// Rescaled so that the `[D]^kappa L^2` norm of the pair is one, with `kappa`
    /// the data's own vanishing order.
    pub fn normalized(&self, cfg: &QuadratureConfig) -> Result<Self> {
        let (a, b) = self.weighted_norms_sq(self.kappa(), cfg)?;
        let total = a + b;
        if !(total > 0.0) {
            return Err(EnergyError::ZeroData);
        }
        let c = 1.0 / total.sqrt();
        Ok(Self {
            first: self.first.scaled(c),
            second: self.second.scaled(c),
        })
    }
}

/// Quadrature controls: Gauss–Legendre order per panel, initial number of
/// log-spaced panels, relative tolerance between successive panel doublings and
/// the number of doublings allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub order: usize,
    pub base_panels: usize,
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            order: 16,
            base_panels: 48,
            rel_tol: 1e-7,
            max_doublings: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    /// Relative change at the last panel doubling.
    pub est_rel_error: f64,
}

/// Sum in a fixed pairwise order, independent of thread scheduling.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Panel boundaries on `[lo, hi]`: a linear panel at the origin, log-spaced
/// panels beyond, each split so that its width is at most `max_width`.
fn panels(lo: f64, hi: f64, base: usize, max_width: f64) -> Vec<(f64, f64)> {
    let mut cuts = Vec::new();
    let start = if lo <= 0.0 {
        cuts.push(0.0);
        ORIGIN_PANEL.min(0.5 * hi)
    } else {
        lo
    };
    cuts.extend(crate::grid::log_space(start, hi, base + 1));
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for i in 0..pieces {
            let right = if i + 1 == pieces {
                b
            } else {
                a + h * (i + 1) as f64
            };
            out.push((a + h * i as f64, right));
        }
    }
    out
}

fn halve(p: &[(f64, f64)]) -> Vec<(f64, f64)> {
    p.iter()
        .flat_map(|&(a, b)| {
            let m = 0.5 * (a + b);
            [(a, m), (m, b)]
        })
        .collect()
}

fn integrate_panels<const K: usize, F>(
    rule: &GaussLegendre,
    panels: &[(f64, f64)],
    f: &F,
) -> Result<[f64; K]>
where
    F: Fn(f64) -> Result<[f64; K]> + Sync,
{
    let pairs = rule.as_node_weight_pairs();
    let contributions: Vec<[f64; K]> = panels
        .par_iter()
        .map(|&(a, b)| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut acc = [0.0; K];
            for &(x, w) in pairs {
                let v = f(mid + half * x)?;
                for k in 0..K {
                    acc[k] += w * v[k];
                }
            }
            Ok(acc.map(|s| s * half))
        })
        .collect::<Result<_>>()?;
    let mut out = [0.0; K];
    for (k, slot) in out.iter_mut().enumerate() {
        let column: Vec<f64> = contributions.iter().map(|c| c[k]).collect();
        *slot = pairwise_sum(&column);
    }
    Ok(out)
}

/// Panel-doubling quadrature of a vector integrand over `support`. `frequency`
/// is the oscillation rate in `r` of the integrand (`t` for the energy), used to
/// size the panels. Convergence is judged on the sum of the components.
fn adaptive_quadrature<const K: usize, F>(
    support: Option<(f64, f64)>,
    frequency: f64,
    cfg: &QuadratureConfig,
    f: F,
) -> Result<[f64; K]>
where
    F: Fn(f64) -> Result<[f64; K]> + Sync,
{
    adaptive_quadrature_with_error(support, frequency, cfg, f).map(|(v, _)| v)
}

fn adaptive_quadrature_with_error<const K: usize, F>(
    support: Option<(f64, f64)>,
    frequency: f64,
    cfg: &QuadratureConfig,
    f: F,
) -> Result<([f64; K], f64)>
where
    F: Fn(f64) -> Result<[f64; K]> + Sync,
{
    let Some((lo, hi)) = support else {
        return Ok(([0.0; K], 0.0));
    };
    let order = NonZeroUsize::new(cfg.order.max(2)).expect("order is at least 2");
    let rule = GaussLegendre::new(order);
    // two full periods of cos(2 r t) per panel
    let max_width = 2.0 * PI / (1.0 + frequency);
    let mut p = panels(lo, hi, cfg.base_panels.max(1), max_width);
    let mut coarse = integrate_panels(&rule, &p, &f)?;
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        p = halve(&p);
        let fine = integrate_panels(&rule, &p, &f)?;
        let total: f64 = fine.iter().map(|x| x.abs()).sum();
        let diff: f64 = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).sum();
        change = if total > 0.0 { diff / total } else { 0.0 };
        coarse = fine;
        if change <= cfg.rel_tol {
            return Ok((coarse, change));
        }
    }
    Err(EnergyError::NoConvergence {
        achieved: change,
        panels: p.len(),
    })
}

/// Energy at time `t` for an arbitrary propagator `r -> M(t, r)` of the energy
/// variables `(r û, û_t)`; lets independent solvers share the quadrature.
pub fn energy_with<F>(
    data: &RadialData,
    t: f64,
    cfg: &QuadratureConfig,
    propagator: F,
) -> Result<EnergySample>
where
    F: Fn(f64) -> Result<Mat2> + Sync,
{
    let n = data.dimension();
    let area = sphere_area(n);
    let integrand = |r: f64| -> Result<[f64; 1]> {
        let (g1, g2) = (data.first.eval(r), data.second.eval(r));
        if g1 == 0.0 && g2 == 0.0 {
            return Ok([0.0]);
        }
        let m = propagator(r)?;
        let [a, b] = m.apply([bracket(r) * g1, g2]);
        Ok([0.5 * (a * a + b * b) * area * r.powi(n as i32 - 1)])
    };
    let ([energy], est_rel_error) =
        adaptive_quadrature_with_error(data.support(), t, cfg, integrand)?;
    Ok(EnergySample {
        t,
        energy,
        est_rel_error,
    })
}

/// `E(u; t)` with the Bessel-function propagator.
pub fn energy(
    p: &ModelParams,
    data: &RadialData,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<EnergySample> {
    energy_with(data, t, cfg, |r| {
        Ok(multiplier::fundamental_symbol(p, t, Freq::new(r)?)?)
    })
}

/// `1/2 (||u₂||^2 + || |D| u₁ ||^2)` straight from the profiles.
pub fn initial_energy(data: &RadialData, cfg: &QuadratureConfig) -> Result<f64> {
    let n = data.dimension();
    let area = sphere_area(n);
    let [e] = adaptive_quadrature(data.support(), 0.0, cfg, |r| {
        let g1 = bracket(r) * data.first.eval(r);
        let g2 = data.second.eval(r);
        Ok([0.5 * (g1 * g1 + g2 * g2) * area * r.powi(n as i32 - 1)])
    })?;
    Ok(e)
}

/// Large-time exponent of `E(u;t)` for data vanishing to order `kappa` at the
/// origin in dimension `n`: the frequencies `r ~ 1/t` contribute `t^-(n+2+2 kappa)`,
/// the rest `t^-mu`; the slower of the two wins (with a logarithm when equal).
pub fn predicted_energy_exponent(mu: f64, n: u32, kappa: f64) -> f64 {
    -(mu.min(n as f64 + 2.0 + 2.0 * kappa))
}

/// Exponent of the squared operator-norm bound, valid for all data in the class.
pub fn upper_bound_exponent(p: &ModelParams) -> f64 {
    2.0 * supnorm_lab::predicted_operator_exponent(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDecayReport {
    pub samples: Vec<EnergySample>,
    pub fit: DecayFit,
    pub predicted_exponent: f64,
    /// `max / min` of `E(u;t) (1+t)^-predicted` over the grid.
    pub ratio: f64,
    /// `max / min` of `E(u;t) (1+t)^mu` over the grid.
    pub ratio_mu: f64,
}

impl EnergyDecayReport {
    pub const CSV_HEADER: &'static str = "t,energy,rate_model,ratio";

    /// Rows `(t, energy, (1+t)^predicted, energy / rate)`.
    pub fn csv_rows(&self) -> Vec<String> {
        self.samples
            .iter()
            .map(|s| {
                let rate = (1.0 + s.t).powf(self.predicted_exponent);
                format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    s.t,
                    s.energy,
                    rate,
                    s.energy / rate
                )
            })
            .collect()
    }
}

/// Energies on `t_grid`, a power-law fit and the two-sided ratio reports.
pub fn energy_decay_experiment(
    p: &ModelParams,
    data: &RadialData,
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<EnergyDecayReport> {
    let samples = t_grid
        .iter()
        .map(|&t| energy(p, data, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.energy)).collect();
    let fit = supnorm_lab::fit_decay(&pts, DecayModel::Power)?;
    let predicted_exponent = predicted_energy_exponent(p.mu(), data.dimension(), data.kappa());
    Ok(EnergyDecayReport {
        ratio: comparability_ratio(&pts, predicted_exponent, false),
        ratio_mu: comparability_ratio(&pts, -p.mu(), false),
        samples,
        fit,
        predicted_exponent,
    })
}
