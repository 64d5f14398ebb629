//! Grid sweeps over one or two parameters.
//!
//! Axis names are the flat parameter keys plus three derived ones:
//! `cooperativity` (rescales both couplings, keeps the ratio),
//! `lambda_ratio` (keeps `λ`, sets `λ_L/λ_R`) and `kappa_p_over_kappa`.

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use super::csv::{num, CsvTable};
use super::figures::{lin_space, log_space};
use crate::metrics::{MetricReport, MetricsError};
use crate::params::{DetectorModel, ParamSet, Qubit};
use crate::spectral::Quadrature;

pub const FIELDS: [&str; 11] =
    ["lambda_L", "lambda_R", "theta_L", "theta_R", "kappa", "gamma", "k_c", "delta_e", "delta_p", "kappa_p", "x_0"];
pub const DERIVED_FIELDS: [&str; 3] = ["cooperativity", "lambda_ratio", "kappa_p_over_kappa"];

pub const COLUMNS: [&str; 18] = [
    "lambda_L",
    "lambda_R",
    "theta_L",
    "theta_R",
    "kappa",
    "gamma",
    "k_c",
    "delta_e",
    "profile",
    "delta_p",
    "kappa_p",
    "x_0",
    "eta",
    "F_swap",
    "F_swap_leading",
    "F_qm",
    "P_qm",
    "P_qm_conditional",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("unknown sweep field `{0}`")]
    InvalidField(String),
    #[error("bad axis `{0}`: expected name:scale:min:max:count with scale lin|log and count >= 2")]
    BadAxis(String),
    #[error("a sweep takes one or two axes, got {0}")]
    AxisCount(usize),
    #[error("cannot set `{field}` to {value}: {reason}")]
    BadValue { field: String, value: f64, reason: &'static str },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub field: String,
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => lin_space(self.min, self.max, self.count),
            Scale::Log => log_space(self.min, self.max, self.count),
        }
    }
}

impl FromStr for Axis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::BadAxis(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let [field, scale, min, max, count] = parts[..] else {
            return Err(bad());
        };
        if !FIELDS.contains(&field) && !DERIVED_FIELDS.contains(&field) {
            return Err(SweepError::InvalidField(field.to_string()));
        }
        let scale = match scale {
            "lin" | "linear" => Scale::Linear,
            "log" => Scale::Log,
            _ => return Err(bad()),
        };
        let min: f64 = min.parse().map_err(|_| bad())?;
        let max: f64 = max.parse().map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if count < 2 || !min.is_finite() || !max.is_finite() || (scale == Scale::Log && !(min > 0.0 && max > 0.0)) {
            return Err(bad());
        }
        Ok(Self { field: field.to_string(), scale, min, max, count })
    }
}

/// Writes `value` into `field` of `p`.
pub fn set_field(p: &mut ParamSet, field: &str, value: f64) -> Result<(), SweepError> {
    let bad = |reason| SweepError::BadValue { field: field.to_string(), value, reason };
    match field {
        "lambda_L" => p.lambda_l = value,
        "lambda_R" => p.lambda_r = value,
        "theta_L" => p.theta_l = value,
        "theta_R" => p.theta_r = value,
        "kappa" => p.kappa = value,
        "gamma" => p.gamma = value,
        "k_c" => p.k_c = value,
        "delta_e" => p.delta_e = value,
        "delta_p" => p.delta_p = value,
        "kappa_p" => p.kappa_p = value,
        "x_0" => p.x_0 = value,
        "kappa_p_over_kappa" => p.kappa_p = value * p.kappa,
        "cooperativity" => {
            let lambda = p.lambda_l.hypot(p.lambda_r);
            if lambda == 0.0 {
                return Err(bad("base couplings are both zero"));
            }
            if value.is_nan() || value < 0.0 {
                return Err(bad("cooperativity must be non-negative"));
            }
            let scale = (value * p.kappa * p.gamma).sqrt() / lambda;
            p.lambda_l *= scale;
            p.lambda_r *= scale;
        }
        "lambda_ratio" => {
            if value.is_nan() || value < 0.0 {
                return Err(bad("ratio must be non-negative"));
            }
            let lambda = p.lambda_l.hypot(p.lambda_r);
            let xi = value.atan();
            p.lambda_l = lambda * xi.sin();
            p.lambda_r = lambda * xi.cos();
        }
        _ => return Err(SweepError::InvalidField(field.to_string())),
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ParamSet,
    pub axes: Vec<Axis>,
    pub detector: DetectorModel,
    pub input: Qubit,
}

impl SweepSpec {
    /// Parameter sets in output order, first axis outermost.
    pub fn points(&self) -> Result<Vec<ParamSet>, SweepError> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(SweepError::AxisCount(self.axes.len()));
        }
        let mut out = vec![self.base];
        for axis in &self.axes {
            let values = axis.values();
            let mut next = Vec::with_capacity(out.len() * values.len());
            for p in &out {
                for &v in &values {
                    let mut q = *p;
                    set_field(&mut q, &axis.field, v)?;
                    next.push(q);
                }
            }
            out = next;
        }
        Ok(out)
    }

    pub fn run(&self, quad: &Quadrature) -> Result<Vec<MetricReport>, SweepError> {
        let points = self.points()?;
        let reports: Result<Vec<_>, MetricsError> =
            points.par_iter().map(|p| MetricReport::evaluate(p, quad, &self.detector, &self.input)).collect();
        Ok(reports?)
    }

    pub fn table(&self, quad: &Quadrature) -> Result<CsvTable, SweepError> {
        let meta = json!({
            "sweep": self.axes,
            "base": self.base,
            "detector": self.detector,
            "input": self.input,
            "quadrature": { "gaussian_nodes": quad.config().gaussian_nodes, "lorentzian_nodes": quad.config().lorentzian_nodes },
        });
        let mut t = CsvTable::new(meta, &COLUMNS);
        for r in self.run(quad)? {
            let p = &r.params;
            let eta = r.eta.map_or_else(|| "table".to_string(), num);
            t.push(vec![
                num(p.lambda_l),
                num(p.lambda_r),
                num(p.theta_l),
                num(p.theta_r),
                num(p.kappa),
                num(p.gamma),
                num(p.k_c),
                num(p.delta_e),
                p.profile.to_string(),
                num(p.delta_p),
                num(p.kappa_p),
                num(p.x_0),
                eta,
                num(r.f_swap),
                num(r.f_swap_leading),
                num(r.f_qm),
                num(r.p_qm),
                num(r.p_qm_conditional),
            ]);
        }
        Ok(t)
    }
}
