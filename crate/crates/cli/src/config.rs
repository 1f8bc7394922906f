//! Experiment configuration: per-command defaults, an optional JSON file and
//! command-line overrides, merged in that order and validated once.

use dampwave::energy_lab::{QuadratureConfig, RadialData, RadialProfile};
use dampwave::grid::{lin_space, log_space};
use dampwave::multiplier::MAX_MU;
use dampwave::{ModelParams, MultiplierIndex};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EvalPhi,
    Decay,
    Scatter,
    Wronskian,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Lin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl GridSpec {
    pub const fn log(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            scale: Scale::Log,
        }
    }

    pub const fn lin(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            scale: Scale::Lin,
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(field_err(field, "bounds must be finite"));
        }
        if self.points == 0 {
            return Err(field_err(field, "needs at least one point"));
        }
        if self.start > self.stop {
            return Err(field_err(
                field,
                format!("start {} exceeds stop {}", self.start, self.stop),
            ));
        }
        if self.points == 1 && self.start != self.stop {
            return Err(field_err(field, "a single point needs start = stop"));
        }
        if self.scale == Scale::Log && self.start <= 0.0 {
            return Err(field_err(field, "log scale needs start > 0"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        match self.scale {
            Scale::Log => log_space(self.start, self.stop, self.points),
            Scale::Lin => lin_space(self.start, self.stop, self.points),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// Operator norm of the energy symbol.
    Operator,
    /// Energy of a solution with the configured data.
    Energy,
    /// Sup-norm of one multiplier symbol.
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSpec {
    pub k: f64,
    pub s: f64,
    pub rho: f64,
    pub delta: i32,
}

/// Deliberate faults for checking that the self-test catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mutation {
    /// Minus sign between the two terms of the first entry of the scattering limit.
    M11,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub mu: f64,
    /// A number, or `"limit"` for `(mu-2)/2`.
    pub kappa: String,
    pub dim: u32,
    pub t_grid: GridSpec,
    pub r_grid: GridSpec,
    /// `gaussian`, `gaussian:center,width`, `annulus:r1,r2` or `weighted:kappa`.
    pub data: String,
    pub quantity: Quantity,
    pub index: Option<IndexSpec>,
    pub nu_grid: GridSpec,
    pub det_r_grid: GridSpec,
    pub high_r_grid: GridSpec,
    pub tol: f64,
    pub closed_form_tol: f64,
    pub det_tol: f64,
    pub oracle_tol: f64,
    pub mutate: Option<Mutation>,
    pub tol_override: Option<f64>,
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        let (t_grid, r_grid, tol) = match command {
            Command::EvalPhi => (
                GridSpec::lin(0.0, 100.0, 5),
                GridSpec::lin(0.01, 20.0, 5),
                1e-6,
            ),
            Command::Decay => (
                GridSpec::log(1e2, 1e5, 13),
                GridSpec::log(1e-6, 1e3, 2000),
                0.05,
            ),
            Command::Scatter => (
                GridSpec::log(1e2, 1e5, 10),
                GridSpec::log(1.0, 50.0, 400),
                0.1,
            ),
            Command::Wronskian => (
                GridSpec::lin(0.0, 0.0, 1),
                GridSpec::log(1e-3, 1e3, 1000),
                1e-10,
            ),
            Command::Selftest => (
                GridSpec::lin(0.0, 0.0, 1),
                GridSpec::log(1e-3, 1e3, 200),
                0.0,
            ),
        };
        let scatter = command == Command::Scatter;
        Self {
            command,
            mu: 3.0,
            kappa: if scatter { "limit" } else { "0" }.to_string(),
            dim: 3,
            t_grid,
            r_grid,
            data: "gaussian".to_string(),
            quantity: Quantity::Operator,
            index: None,
            nu_grid: GridSpec::lin(-3.5, 10.0, 28),
            det_r_grid: GridSpec::log(1e-4, 1e3, 300),
            high_r_grid: GridSpec::log(10.0, 1e3, 200),
            tol,
            closed_form_tol: if scatter { 1e-10 } else { 1e-8 },
            det_tol: 1e-9,
            oracle_tol: 1e-10,
            mutate: None,
            tol_override: None,
        }
    }

    /// Defaults, then the JSON file (if any), then `overrides`.
    pub fn build(
        command: Command,
        file: Option<&Path>,
        overrides: Map<String, Value>,
    ) -> Result<Self, ConfigError> {
        let mut merged = match serde_json::to_value(Self::defaults(command)) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("config serializes to an object"),
        };
        if let Some(path) = file {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
                path: shown.clone(),
                message: e.to_string(),
            })?;
            let parsed: Value = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
                path: shown.clone(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let Value::Object(m) = parsed else {
                return Err(ConfigError::Parse {
                    path: shown,
                    line: 1,
                    column: 1,
                    message: "expected a JSON object".into(),
                });
            };
            merge(&mut merged, m);
        }
        merge(&mut merged, overrides);
        merged.insert("command".into(), serde_json::to_value(command).unwrap());
        let cfg: Self = serde_json::from_value(Value::Object(merged)).map_err(|e| {
            // serde reports the offending field by name in its message
            field_err("config", e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mu >= 2.0 && self.mu <= MAX_MU) {
            return Err(field_err(
                "mu",
                format!("must lie in [2, {MAX_MU}], got {}", self.mu),
            ));
        }
        self.kappa_value()?;
        if self.dim == 0 {
            return Err(field_err("dim", "must be at least 1"));
        }
        self.t_grid.validate("t_grid")?;
        if self.t_grid.start < 0.0 {
            return Err(field_err("t_grid", "times must be nonnegative"));
        }
        self.r_grid.validate("r_grid")?;
        if self.r_grid.start < 0.0 {
            return Err(field_err("r_grid", "frequencies must be nonnegative"));
        }
        self.nu_grid.validate("nu_grid")?;
        self.det_r_grid.validate("det_r_grid")?;
        self.high_r_grid.validate("high_r_grid")?;
        for (name, v) in [
            ("tol", self.tol),
            ("closed_form_tol", self.closed_form_tol),
            ("det_tol", self.det_tol),
            ("oracle_tol", self.oracle_tol),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(field_err(
                    name,
                    format!("must be finite and nonnegative, got {v}"),
                ));
            }
        }
        if let Some(v) = self.tol_override {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(field_err("tol_override", "must be finite and nonnegative"));
            }
        }
        if self.quantity == Quantity::Psi && self.command == Command::Decay {
            let idx = self
                .index
                .ok_or_else(|| field_err("index", "psi decay needs k, s, delta"))?;
            MultiplierIndex::new(idx.k, idx.s, idx.rho, idx.delta)
                .map_err(|e| field_err("index", e.to_string()))?;
        }
        let p = self
            .model()
            .map_err(|e| field_err("kappa", e.to_string()))?;
        if self.command == Command::Scatter && !p.is_limit_case() {
            return Err(field_err(
                "kappa",
                "scatter needs kappa = (mu-2)/2; pass `limit`",
            ));
        }
        self.radial_data_unnormalized()?;
        Ok(())
    }

    pub fn kappa_value(&self) -> Result<f64, ConfigError> {
        if self.kappa == "limit" {
            return Ok((self.mu - 2.0) / 2.0);
        }
        let k: f64 = self.kappa.parse().map_err(|_| {
            field_err(
                "kappa",
                format!("expected a number or \"limit\", got `{}`", self.kappa),
            )
        })?;
        if !(k >= 0.0 && k.is_finite()) {
            return Err(field_err("kappa", "must be finite and nonnegative"));
        }
        Ok(k)
    }

    pub fn model(&self) -> Result<ModelParams, dampwave::multiplier::MultiplierError> {
        let kappa = self.kappa_value().unwrap_or(f64::NAN);
        ModelParams::new(self.mu, kappa)
    }

    pub fn psi_index(&self) -> Option<MultiplierIndex> {
        let i = self.index?;
        MultiplierIndex::new(i.k, i.s, i.rho, i.delta).ok()
    }

    fn radial_data_unnormalized(&self) -> Result<RadialData, ConfigError> {
        let bad = |m: String| field_err("data", m);
        let (kind, args) = match self.data.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (self.data.as_str(), None),
        };
        let nums = |a: Option<&str>, n: usize| -> Result<Vec<f64>, ConfigError> {
            let a = a.ok_or_else(|| bad(format!("`{kind}` needs {n} parameter(s)")))?;
            let v = a
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("cannot parse parameters `{a}`")))?;
            if v.len() != n {
                return Err(bad(format!(
                    "`{kind}` needs {n} parameter(s), got {}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let n = self.dim;
        let profile = match kind {
            "gaussian" => match args {
                None => RadialProfile::gaussian(n, 0.0, 1.0),
                Some(_) => {
                    let v = nums(args, 2)?;
                    RadialProfile::gaussian(n, v[0], v[1])
                }
            },
            "annulus" => {
                let v = nums(args, 2)?;
                RadialProfile::annulus(n, v[0], v[1])
            }
            "weighted" => {
                let v = nums(args, 1)?;
                RadialProfile::gaussian(n, 0.0, 1.0).and_then(|g| g.kappa_weighted(v[0]))
            }
            other => return Err(bad(format!("unknown data kind `{other}`"))),
        }
        .map_err(|e| bad(e.to_string()))?;
        RadialData::new(profile, profile).map_err(|e| bad(e.to_string()))
    }

    /// The configured data, normalized to unit weighted norm.
    pub fn radial_data(&self, cfg: &QuadratureConfig) -> Result<RadialData, ConfigError> {
        self.radial_data_unnormalized()?
            .normalized(cfg)
            .map_err(|e| field_err("data", e.to_string()))
    }
}

fn merge(base: &mut Map<String, Value>, over: Map<String, Value>) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Object(b)), Value::Object(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
