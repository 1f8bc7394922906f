//! The experiment subcommands. Each one turns a validated config into a report.

use crate::config::{ExperimentConfig, Quantity};
use crate::report::{sci, Check, Report};
use dampwave::energy_lab::{
    energy_decay_experiment, EnergyDecayReport, EnergyError, QuadratureConfig,
};
use dampwave::mode_oracle::{integrate_mode, OracleError};
use dampwave::multiplier::{multipliers, multipliers_at_zero, MultiplierError};
use dampwave::scattering::{
    max_deviation_on, z_plus, z_plus_det, DeviationSample, ScatteringError,
};
use dampwave::specfun::{cross_product, SpecFunError};
use dampwave::supnorm_lab::{
    comparability_ratio, fit_decay, fit_points, operator_norm_series, predicted_operator_exponent,
    predicted_psi_exponent, sup_norm_series, DecayModel, LabError, SupNormSample,
};
use dampwave::{Freq, Mat2, ModelParams};
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::FRAC_2_PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, RunError>;

/// `(Φ₁, Φ₂, ∂Φ₁, ∂Φ₂)`.
type Quad = [f64; 4];

fn library_values(p: &ModelParams, t: f64, r: f64) -> Result<Quad> {
    let m = if r == 0.0 {
        multipliers_at_zero(p, t)?
    } else {
        multipliers(p, t, Freq::new(r)?)?
    };
    Ok([m.phi1, m.phi2, r * m.dphi1_over_r, m.dphi2])
}

fn oracle_values(p: &ModelParams, t: f64, r: f64, tol: f64) -> Result<Quad> {
    let a = integrate_mode(p, r, 1.0, 0.0, t, tol)?;
    let b = integrate_mode(p, r, 0.0, 1.0, t, tol)?;
    Ok([a.v, b.v, a.vdot, b.vdot])
}

/// Closed forms at `mu = 2`: `Φ₁ = (cos rt + sin(rt)/r)/(1+t)`, `Φ₂ = sin(rt)/(r(1+t))`.
pub fn trigonometric_values(t: f64, r: f64) -> Quad {
    let s = 1.0 + t;
    let (sn, cs) = (r * t).sin_cos();
    // sin(rt)/r, finite at r = 0
    let sinc = if r == 0.0 { t } else { sn / r };
    let phi1 = (cs + sinc) / s;
    let phi2 = sinc / s;
    [phi1, phi2, (cs - r * sn) / s - phi1 / s, cs / s - phi2 / s]
}

/// Largest column-relative difference; each column `(Φ_j, ∂Φ_j)` is measured
/// against its own size so that zeros of single entries do not blow it up.
pub fn column_deviation(got: &Quad, want: &Quad) -> f64 {
    let col = |v: usize, d: usize| {
        let scale = want[v].abs().max(want[d].abs());
        (got[v] - want[v]).abs().max((got[d] - want[d]).abs()) / scale
    };
    col(0, 2).max(col(1, 3))
}

pub fn eval_phi(cfg: &ExperimentConfig) -> Result<Report> {
    let p = ModelParams::new(cfg.mu, 0.0)?;
    let trig = cfg.mu == 2.0;
    let pairs: Vec<(f64, f64)> = cfg
        .t_grid
        .values()
        .into_iter()
        .flat_map(|t| cfg.r_grid.values().into_iter().map(move |r| (t, r)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(t, r)| {
            let lib = library_values(&p, t, r)?;
            let ode = oracle_values(&p, t, r, cfg.oracle_tol)?;
            let closed = trig.then(|| trigonometric_values(t, r));
            Ok((t, r, lib, ode, closed))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut worst_oracle = 0.0f64;
    let mut worst_closed = 0.0f64;
    let mut lines = Vec::with_capacity(rows.len());
    for (t, r, lib, ode, closed) in &rows {
        let dev = column_deviation(lib, ode);
        worst_oracle = worst_oracle.max(dev);
        let mut fields: Vec<String> = [*t, *r]
            .iter()
            .chain(lib)
            .chain(ode)
            .map(|x| sci(*x))
            .collect();
        fields.push(sci(dev));
        if let Some(c) = closed {
            let cdev = column_deviation(lib, c);
            worst_closed = worst_closed.max(cdev);
            fields.extend(c.iter().map(|x| sci(*x)));
            fields.push(sci(cdev));
        }
        lines.push(fields.join(","));
    }
    let mut header = String::from(
        "t,r,phi1,phi2,dphi1,dphi2,oracle_phi1,oracle_phi2,oracle_dphi1,oracle_dphi2,oracle_deviation",
    );
    let mut checks = vec![Check::new("oracle-deviation", worst_oracle, cfg.tol)];
    if trig {
        header.push_str(",closed_phi1,closed_phi2,closed_dphi1,closed_dphi2,closed_deviation");
        checks.push(Check::new(
            "closed-form-deviation",
            worst_closed,
            cfg.closed_form_tol,
        ));
    }
    Ok(Report {
        csv_header: header,
        rows: lines,
        results: json!({
            "points": rows.len(),
            "max_oracle_deviation": worst_oracle,
            "max_closed_form_deviation": trig.then_some(worst_closed),
        }),
        checks,
    })
}

pub fn decay(cfg: &ExperimentConfig) -> Result<Report> {
    let times = cfg.t_grid.values();
    match cfg.quantity {
        Quantity::Operator => {
            let p = cfg.model()?;
            let samples = operator_norm_series(&p, &times, &cfg.r_grid.values())?;
            sup_report(
                cfg,
                &samples,
                predicted_operator_exponent(&p),
                DecayModel::Power,
            )
        }
        Quantity::Psi => {
            let idx = cfg.psi_index().expect("index validated with the config");
            let samples = sup_norm_series(idx, &times, &cfg.r_grid.values())?;
            let model = if idx.rho == 0.0 {
                DecayModel::PowerLog
            } else {
                DecayModel::Power
            };
            sup_report(cfg, &samples, predicted_psi_exponent(&idx), model)
        }
        Quantity::Energy => {
            let p = cfg.model()?;
            let q = QuadratureConfig::default();
            let data = cfg.radial_data(&q)?;
            let rep = energy_decay_experiment(&p, &data, &times, &q)?;
            Ok(energy_report(cfg, rep))
        }
    }
}

fn sup_report(
    cfg: &ExperimentConfig,
    samples: &[SupNormSample],
    predicted: f64,
    model: DecayModel,
) -> Result<Report> {
    let pts = fit_points(samples);
    let fit = fit_decay(&pts, model)?;
    let log_factor = model == DecayModel::PowerLog;
    let ratio = comparability_ratio(&pts, predicted, log_factor);
    let unbounded = samples.iter().filter(|s| s.unbounded).count();
    Ok(Report {
        csv_header: SupNormSample::CSV_HEADER.to_string(),
        rows: samples.iter().map(SupNormSample::csv_row).collect(),
        results: json!({
            "fit": fit,
            "predicted_exponent": predicted,
            "comparability_ratio": ratio,
            "unbounded_samples": unbounded,
        }),
        checks: vec![
            Check::new("exponent", (fit.exponent - predicted).abs(), cfg.tol),
            Check::new("unbounded-samples", unbounded as f64, 0.0),
        ],
    })
}

fn energy_report(cfg: &ExperimentConfig, rep: EnergyDecayReport) -> Report {
    Report {
        csv_header: EnergyDecayReport::CSV_HEADER.to_string(),
        rows: rep.csv_rows(),
        results: json!({
            "fit": rep.fit,
            "predicted_exponent": rep.predicted_exponent,
            "ratio": rep.ratio,
            "ratio_mu": rep.ratio_mu,
        }),
        checks: vec![Check::new(
            "exponent",
            (rep.fit.exponent - rep.predicted_exponent).abs(),
            cfg.tol,
        )],
    }
}

/// `max |det Z+ / [r]^(1+2k) - 1|` over `grid`.
pub fn det_law_deviation(p: &ModelParams, grid: &[f64]) -> Result<f64> {
    let devs = grid
        .par_iter()
        .map(|&r| {
            let f = Freq::new(r)?;
            let want = f.bracket().powf(1.0 + 2.0 * p.kappa());
            Ok((z_plus_det(p, f)? / want - 1.0).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// `r ||Z+(r) - I||` on `grid`.
pub fn scaled_identity_gap(p: &ModelParams, grid: &[f64]) -> Result<Vec<f64>> {
    grid.par_iter()
        .map(|&r| Ok(r * (z_plus(p, Freq::new(r)?)? - Mat2::IDENTITY).spectral_norm()))
        .collect()
}

/// `max over the upper half / max over the lower half` of a sequence.
pub fn growth_ratio(values: &[f64]) -> f64 {
    let (lo, hi) = values.split_at(values.len() / 2);
    let m = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    m(hi) / m(lo)
}

/// The closed form at `mu = 2`: `[[ [r], 0 ], [ 1/<r>, 1 ]]`.
pub fn trigonometric_limit(f: Freq) -> Mat2 {
    Mat2::new(f.bracket(), 0.0, 1.0 / f.angle(), 1.0)
}

pub fn scatter(cfg: &ExperimentConfig) -> Result<Report> {
    let p = ModelParams::limit_case(cfg.mu)?;
    let window = cfg.r_grid.values();
    let samples = cfg
        .t_grid
        .values()
        .iter()
        .map(|&t| max_deviation_on(&p, t, &window))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.deviation)).collect();
    let fit = fit_decay(&pts, DecayModel::Power)?;

    let det_grid = cfg.det_r_grid.values();
    let det_dev = det_law_deviation(&p, &det_grid)?;
    let gaps = scaled_identity_gap(&p, &cfg.high_r_grid.values())?;
    let growth = growth_ratio(&gaps);
    let constant = gaps.iter().cloned().fold(0.0, f64::max);

    let mut checks = vec![
        Check::new("convergence-exponent", (fit.exponent + 1.0).abs(), cfg.tol),
        Check::new("determinant-law", det_dev, cfg.det_tol),
        Check::new("high-frequency-growth", growth - 1.0, cfg.tol),
    ];
    let mut results = json!({
        "fit": fit,
        "max_det_deviation": det_dev,
        "high_frequency_constant": constant,
        "high_frequency_growth": growth,
    });
    if cfg.mu == 2.0 {
        let mut identity_gap = 0.0f64;
        let mut closed_gap = 0.0f64;
        for &r in &det_grid {
            let f = Freq::new(r)?;
            let z = z_plus(&p, f)?;
            identity_gap = identity_gap.max((z - Mat2::IDENTITY).spectral_norm());
            closed_gap = closed_gap.max(z.max_abs_diff(&trigonometric_limit(f)));
        }
        checks.push(Check::new(
            "mu2-identity",
            identity_gap,
            cfg.closed_form_tol,
        ));
        checks.push(Check::new(
            "mu2-closed-form",
            closed_gap,
            cfg.closed_form_tol,
        ));
        results["mu2_identity_gap"] = json!(identity_gap);
        results["mu2_closed_form_gap"] = json!(closed_gap);
    }
    Ok(Report {
        csv_header: DeviationSample::CSV_HEADER.to_string(),
        rows: samples.iter().map(DeviationSample::csv_row).collect(),
        results,
        checks,
    })
}

/// Relative defect of `J_{nu+1} Y_nu - J_nu Y_{nu+1} = 2/(pi z)`.
pub fn wronskian_defect(nu: f64, z: f64) -> Result<(f64, f64)> {
    let cross = cross_product(nu, z)?;
    let want = FRAC_2_PI / z;
    Ok((cross, (cross / want - 1.0).abs()))
}

pub fn wronskian(cfg: &ExperimentConfig) -> Result<Report> {
    let pairs: Vec<(f64, f64)> = cfg
        .nu_grid
        .values()
        .into_iter()
        .flat_map(|nu| cfg.r_grid.values().into_iter().map(move |z| (nu, z)))
        .collect();
    let vals = pairs
        .par_iter()
        .map(|&(nu, z)| wronskian_defect(nu, z))
        .collect::<Result<Vec<_>>>()?;
    let worst = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let rows = pairs
        .iter()
        .zip(&vals)
        .map(|(&(nu, z), &(cross, dev))| [nu, z, cross, FRAC_2_PI / z, dev].map(sci).join(","))
        .collect();
    Ok(Report {
        csv_header: "nu,z,cross,expected,rel_deviation".to_string(),
        rows,
        results: json!({ "points": pairs.len(), "max_rel_deviation": worst }),
        checks: vec![Check::new("wronskian", worst, cfg.tol)],
    })
}
