//! `dampwave`: deterministic experiment driver for the damped-wave library.
//!
//! Exit codes: 0 when every check is within tolerance, 1 on a check failure or
//! a numerical error, 2 on a configuration error.

mod commands;
mod config;
mod report;
mod selftest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{Command, ExperimentConfig, Mutation, Quantity, Scale};
use report::Report;
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dampwave",
    version,
    about = "Decay and scattering experiments for the weakly damped wave equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the four propagators against the ODE oracle.
    EvalPhi(Common),
    /// Fit decay exponents of sup-norms, operator norms or energies.
    Decay {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        quantity: Option<QuantityArg>,
        /// Multiplier index `k,s,rho,delta` for `--quantity psi`.
        #[arg(long, value_name = "K,S,RHO,DELTA")]
        index: Option<String>,
    },
    /// Convergence of the rescaled solution operator to its scattering limit.
    Scatter(Common),
    /// Cross-product Wronskian of the Bessel functions on an order x argument grid.
    Wronskian {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nu_start: Option<f64>,
        #[arg(long)]
        nu_stop: Option<f64>,
        #[arg(long)]
        nu_points: Option<usize>,
    },
    /// Reduced invariant suite over all modules.
    Selftest {
        #[command(flatten)]
        common: Common,
        /// Inject a known fault to show that the suite catches it.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        /// Replace every tolerance by this value.
        #[arg(long)]
        tol_override: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mu: Option<f64>,
    /// A number or `limit` for (mu-2)/2.
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_stop: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long, value_enum)]
    t_scale: Option<ScaleArg>,
    #[arg(long)]
    r_start: Option<f64>,
    #[arg(long)]
    r_stop: Option<f64>,
    #[arg(long)]
    r_points: Option<usize>,
    #[arg(long, value_enum)]
    r_scale: Option<ScaleArg>,
    /// `gaussian`, `gaussian:center,width`, `annulus:r1,r2` or `weighted:kappa`.
    #[arg(long)]
    data: Option<String>,
    /// Tolerance of the primary check.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; a JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Log,
    Lin,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Operator,
    Energy,
    Psi,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    M11,
}

fn put<T: serde::Serialize>(m: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        m.insert(
            key.into(),
            serde_json::to_value(v).expect("flag value serializes"),
        );
    }
}

fn grid_overrides(
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    scale: Option<ScaleArg>,
) -> Option<Value> {
    let mut g = Map::new();
    put(&mut g, "start", start);
    put(&mut g, "stop", stop);
    put(&mut g, "points", points);
    put(
        &mut g,
        "scale",
        scale.map(|s| match s {
            ScaleArg::Log => Scale::Log,
            ScaleArg::Lin => Scale::Lin,
        }),
    );
    (!g.is_empty()).then_some(Value::Object(g))
}

impl Common {
    fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        put(&mut m, "mu", self.mu);
        put(&mut m, "kappa", self.kappa.clone());
        put(&mut m, "dim", self.dim);
        put(
            &mut m,
            "t_grid",
            grid_overrides(self.t_start, self.t_stop, self.t_points, self.t_scale),
        );
        put(
            &mut m,
            "r_grid",
            grid_overrides(self.r_start, self.r_stop, self.r_points, self.r_scale),
        );
        put(&mut m, "data", self.data.clone());
        put(&mut m, "tol", self.tol);
        m
    }
}

fn parse_index(s: &str) -> Result<Value, config::ConfigError> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || config::ConfigError::Field {
        field: "index".into(),
        message: format!("expected k,s,rho,delta, got `{s}`"),
    };
    if v.len() != 4 {
        return Err(bad());
    }
    let f = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let delta: i32 = v[3].parse().map_err(|_| bad())?;
    Ok(json!({ "k": f(v[0])?, "s": f(v[1])?, "rho": f(v[2])?, "delta": delta }))
}

fn build(cli: &Cli) -> Result<(ExperimentConfig, &Common), config::ConfigError> {
    let (command, common, mut extra) = match &cli.command {
        Cmd::EvalPhi(c) => (Command::EvalPhi, c, Map::new()),
        Cmd::Scatter(c) => (Command::Scatter, c, Map::new()),
        Cmd::Decay {
            common,
            quantity,
            index,
        } => {
            let mut m = Map::new();
            put(
                &mut m,
                "quantity",
                quantity.map(|q| match q {
                    QuantityArg::Operator => Quantity::Operator,
                    QuantityArg::Energy => Quantity::Energy,
                    QuantityArg::Psi => Quantity::Psi,
                }),
            );
            if let Some(s) = index {
                m.insert("index".into(), parse_index(s)?);
            }
            (Command::Decay, common, m)
        }
        Cmd::Wronskian {
            common,
            nu_start,
            nu_stop,
            nu_points,
        } => {
            let mut m = Map::new();
            put(
                &mut m,
                "nu_grid",
                grid_overrides(*nu_start, *nu_stop, *nu_points, None),
            );
            (Command::Wronskian, common, m)
        }
        Cmd::Selftest {
            common,
            mutate,
            tol_override,
        } => {
            let mut m = Map::new();
            put(&mut m, "mutate", mutate.map(|_| Mutation::M11));
            put(&mut m, "tol_override", *tol_override);
            (Command::Selftest, common, m)
        }
    };
    let mut overrides = common.overrides();
    overrides.append(&mut extra);
    let cfg = ExperimentConfig::build(command, common.config.as_deref(), overrides)?;
    Ok((cfg, common))
}

fn run(cfg: &ExperimentConfig) -> commands::Result<Report> {
    match cfg.command {
        Command::EvalPhi => commands::eval_phi(cfg),
        Command::Decay => commands::decay(cfg),
        Command::Scatter => commands::scatter(cfg),
        Command::Wronskian => commands::wronskian(cfg),
        Command::Selftest => selftest::run(cfg),
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn emit(common: &Common, cfg: &ExperimentConfig, report: &Report) -> std::io::Result<()> {
    let csv = report::render_csv(cfg, report);
    let summary = report::render_json(cfg, report);
    let primary = match common.format {
        Format::Csv => &csv,
        Format::Json => &summary,
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, primary)?;
            if matches!(common.format, Format::Csv) {
                std::fs::write(summary_path(path), &summary)?;
            }
        }
        None => print!("{primary}"),
    }
    for c in &report.checks {
        eprintln!(
            "{} {} value={:e} tolerance={:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, common) = match build(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(commands::RunError::Config(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(common, &cfg, &report) {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(1);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
