//! Command-line front end. `main.rs` only parses arguments and maps the
//! outcome to an exit code; everything else lives here so it can be tested.

pub mod csv;
pub mod figures;
pub mod suite;
pub mod sweep;

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::metrics::{quadrature_delta, MetricReport, MetricsError};
use crate::params::{DetectorModel, ParamError, ParamSet, Profile, Qubit, C64};
use crate::scattering::{coupling_amplitude, t_matrix, Polarization, ScatteringError};
use crate::spectral::{Quadrature, QuadratureConfig, SpectralError};
use crate::statesim::{compare_with_closed_form, StateSimError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("bad --qubit `{0}`: expected THETA,PHI (Bloch angles in radians)")]
    BadQubit(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    StateSim(#[from] StateSimError),
    #[error(transparent)]
    Sweep(#[from] sweep::SweepError),
}

#[derive(Debug, Parser)]
#[command(name = "cavity-memory", version, about = "Fidelity and efficiency of a cavity-QED photon memory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Quadrature nodes for both pulse profiles.
    #[arg(long = "quad-n", value_name = "N")]
    pub quad_n: Option<usize>,
    /// Also evaluate with twice the nodes and report |[h]_N - [h]_2N|.
    #[arg(long = "quad-check")]
    pub quad_check: bool,
}

impl QuadArgs {
    pub fn quadrature(&self) -> Result<Quadrature, CliError> {
        let config = self.quad_n.map_or_else(QuadratureConfig::default, QuadratureConfig::uniform);
        Ok(Quadrature::new(config)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Flat JSON parameter file; defaults to C = 10, κ = 2γ, κ_p = 0.1κ.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Constant detector efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// JSON file {"k": [...], "eta": [...]} with a tabulated efficiency.
    #[arg(long = "eta-table", value_name = "FILE", conflicts_with = "eta")]
    pub eta_table: Option<PathBuf>,
    /// Input photon qubit as Bloch angles THETA,PHI; default (|L⟩+|R⟩)/√2.
    #[arg(long, value_name = "THETA,PHI", value_parser = parse_qubit)]
    pub qubit: Option<Qubit>,
}

impl ModelArgs {
    pub fn param_set(&self) -> Result<ParamSet, CliError> {
        match &self.params {
            Some(path) => {
                let text = read(path)?;
                let set = ParamSet::from_json(&text).map_err(|source| CliError::Json { path: path.clone(), source })?;
                set.validate()?;
                Ok(set)
            }
            None => Ok(default_params()),
        }
    }

    pub fn detector(&self) -> Result<DetectorModel, CliError> {
        let model = match &self.eta_table {
            Some(path) => {
                #[derive(serde::Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Table {
                    k: Vec<f64>,
                    eta: Vec<f64>,
                }
                let t: Table = serde_json::from_str(&read(path)?)
                    .map_err(|source| CliError::Json { path: path.clone(), source })?;
                DetectorModel::Tabulated { k: t.k, eta: t.eta }
            }
            None => DetectorModel::Constant(self.eta),
        };
        Ok(model.validate()?)
    }

    pub fn input(&self) -> Qubit {
        self.qubit.unwrap_or_else(|| Qubit::from_bloch(FRAC_PI_2, 0.0))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Samples along the horizontal axis.
    #[arg(long, default_value_t = figures::DEFAULT_POINTS)]
    pub points: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering amplitudes at one wavenumber and every figure of merit.
    Point {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        quad: QuadArgs,
        /// Wavenumber relative to the cavity resonance; defaults to the pulse peak.
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// F_qm and F_swap against cooperativity.
    Fig2(FigureArgs),
    /// F_qm against pulse width for both profiles.
    Fig3(FigureArgs),
    /// P_qm against the coupling ratio.
    Fig4(FigureArgs),
    /// MetricReport rows over a one- or two-axis grid.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        quad: QuadArgs,
        /// NAME:SCALE:MIN:MAX:COUNT, SCALE is lin or log; give once or twice.
        #[arg(long, required = true, num_args = 1, allow_hyphen_values = true)]
        axis: Vec<sweep::Axis>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Storage and retrieval simulated on the k-grid, compared with the closed forms.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Randomized invariant and oracle checks; exits non-zero on failure.
    Validate {
        #[arg(long, default_value_t = suite::SuiteConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = suite::SuiteConfig::default().identity_samples)]
        samples: usize,
        #[arg(long, default_value_t = suite::SuiteConfig::default().oracle_trials)]
        trials: usize,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

pub fn parse_qubit(s: &str) -> Result<Qubit, String> {
    let err = || CliError::BadQubit(s.to_string()).to_string();
    let (theta, phi) = s.split_once(',').ok_or_else(err)?;
    let theta: f64 = theta.trim().parse().map_err(|_| err())?;
    let phi: f64 = phi.trim().parse().map_err(|_| err())?;
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(err());
    }
    Ok(Qubit::from_bloch(theta, phi))
}

pub fn default_params() -> ParamSet {
    figures::point(10.0, 1.0, figures::FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, &figures::FIG2_CASES[0])
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, value: &Value) -> Result<String, CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ReIm {
    re: f64,
    im: f64,
}

impl From<C64> for ReIm {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

fn quadrature_json(quad: &Quadrature) -> Value {
    json!({ "gaussian_nodes": quad.config().gaussian_nodes, "lorentzian_nodes": quad.config().lorentzian_nodes })
}

fn quad_delta(args: &QuadArgs, quad: &Quadrature, params: &ParamSet) -> Result<Option<f64>, CliError> {
    if !args.quad_check {
        return Ok(None);
    }
    let (cavity, pulse) = params.validate()?;
    Ok(Some(quadrature_delta(&cavity, &pulse, quad)?))
}

/// What a command produced: text for stdout and whether all checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub success: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, success: true }
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Point { model, quad, k, out } => {
            let params = model.param_set()?;
            let q = quad.quadrature()?;
            let detector = model.detector()?;
            let input = model.input();
            let (cavity, pulse) = params.validate()?;
            let k = k.unwrap_or(pulse.delta_p);
            let t = t_matrix(k, &cavity)?;
            let report = MetricReport::evaluate(&params, &q, &detector, &input)?;
            let mut value = serde_json::to_value(&report).expect("report serializes");
            let extra = json!({
                "scattering": {
                    "k": k,
                    "phase_factor": ReIm::from(t.phase_factor),
                    "T_LL": ReIm::from(t.t_ll),
                    "T_RR": ReIm::from(t.t_rr),
                    "T_LR": ReIm::from(t.t_lr),
                    "T_RL": ReIm::from(t.t_rl),
                    "g_L": ReIm::from(coupling_amplitude(k, &cavity, Polarization::L)),
                    "g_R": ReIm::from(coupling_amplitude(k, &cavity, Polarization::R)),
                },
                "input": { "c_L": ReIm::from(input.l), "c_R": ReIm::from(input.r) },
                "detector": detector,
                "quadrature": quadrature_json(&q),
                "quadrature_delta": quad_delta(quad, &q, &params)?,
            });
            merge(&mut value, extra);
            Ok(Outcome::ok(emit(out.as_deref(), &value)?))
        }
        Command::Fig2(args) | Command::Fig3(args) | Command::Fig4(args) => {
            let q = args.quad.quadrature()?;
            let table = match command {
                Command::Fig2(_) => figures::fig2_table(&q, args.points)?,
                Command::Fig3(_) => figures::fig3_table(&q, args.points)?,
                _ => figures::fig4_table(&q, args.points)?,
            };
            write(&args.out, &table.render())?;
            let mut stdout = format!("wrote {} rows to {}\n", table.rows.len(), args.out.display());
            if let Some(d) = quad_delta(&args.quad, &q, &default_params())? {
                stdout.push_str(&format!("quadrature delta at C = 10: {d:e}\n"));
            }
            Ok(Outcome::ok(stdout))
        }
        Command::Sweep { model, quad, axis, out } => {
            let q = quad.quadrature()?;
            let spec = sweep::SweepSpec {
                base: model.param_set()?,
                axes: axis.clone(),
                detector: model.detector()?,
                input: model.input(),
            };
            let table = spec.table(&q)?;
            write(out, &table.render())?;
            let mut stdout = format!("wrote {} rows to {}\n", table.rows.len(), out.display());
            if let Some(d) = quad_delta(quad, &q, &spec.base)? {
                stdout.push_str(&format!("quadrature delta at the base point: {d:e}\n"));
            }
            Ok(Outcome::ok(stdout))
        }
        Command::Oracle { model, quad, out } => {
            let params = model.param_set()?;
            let q = quad.quadrature()?;
            let detector = model.detector()?;
            let input = model.input();
            let (cavity, pulse) = params.validate()?;
            let (record, deltas) = compare_with_closed_form(&cavity, &pulse, &q, &input, &detector)?;
            let mut value = serde_json::to_value(record).expect("record serializes");
            merge(
                &mut value,
                json!({
                    "closed_form_deltas": deltas,
                    "params": params,
                    "input": { "c_L": ReIm::from(input.l), "c_R": ReIm::from(input.r) },
                    "detector": detector,
                    "quadrature": quadrature_json(&q),
                    "quadrature_delta": quad_delta(quad, &q, &params)?,
                }),
            );
            Ok(Outcome::ok(emit(out.as_deref(), &value)?))
        }
        Command::Validate { seed, samples, trials, quad } => {
            let q = quad.quadrature()?;
            let config = suite::SuiteConfig { seed: *seed, identity_samples: *samples, oracle_trials: *trials };
            let report = suite::run_suite(&config, &q);
            let mut stdout = String::new();
            for c in &report.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                stdout.push_str(&format!("{mark}  {}  (worst {:e}, tolerance {:e})\n", c.name, c.worst, c.tolerance));
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            stdout.push_str(&format!("{passed}/{} checks passed (seed {seed})\n", report.checks.len()));
            Ok(Outcome { stdout, success: report.passed() })
        }
    }
}

fn merge(into: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, extra) {
        a.extend(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_parsing() {
        let q = parse_qubit("3.141592653589793,0").unwrap();
        assert!(q.l.norm() < 1e-15 && (q.r.norm() - 1.0).abs() < 1e-15);
        assert!(parse_qubit("1").is_err());
        assert!(parse_qubit("a,b").is_err());
    }

    #[test]
    fn default_input_is_balanced() {
        let args = ModelArgs { params: None, eta: 1.0, eta_table: None, qubit: None };
        let q = args.input();
        assert!((q.l.norm_sqr() - 0.5).abs() < 1e-15 && (q.r.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cli_parses_sweep_axes() {
        let cli = Cli::try_parse_from([
            "cavity-memory",
            "sweep",
            "--axis",
            "delta_p:lin:-1:1:3",
            "--axis",
            "cooperativity:log:1:100:3",
            "--out",
            "x.csv",
        ])
        .unwrap();
        match cli.command {
            Command::Sweep { axis, .. } => assert_eq!(axis.len(), 2),
            _ => panic!("wrong subcommand"),
        }
    }
}
