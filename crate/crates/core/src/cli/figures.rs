//! Data behind the three figure panels. Units: `γ = 1`, `κ = 2γ`, equal
//! couplings unless the ratio is the swept variable.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::csv::{num, CsvTable};
use crate::metrics::{qm_fidelity, qm_success, swap_fidelity, MetricsError};
use crate::params::{ParamSet, Profile, PulseSpec, SystemParams};
use crate::spectral::Quadrature;

pub const DEFAULT_POINTS: usize = 61;
pub const GAMMA: f64 = 1.0;
pub const KAPPA: f64 = 2.0 * GAMMA;

/// One detuning configuration (one line style in a panel).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Case {
    pub name: &'static str,
    pub delta_e: f64,
    pub delta_p: f64,
}

pub const FIG2_CASES: [Case; 3] = [
    Case { name: "solid", delta_e: 0.0, delta_p: 0.0 },
    Case { name: "dashed", delta_e: 5.0 * GAMMA, delta_p: 0.0 },
    Case { name: "dotted", delta_e: 0.0, delta_p: 0.5 * GAMMA },
];

pub const FIG3_CASES: [Case; 3] = [
    Case { name: "solid", delta_e: 0.0, delta_p: 0.0 },
    Case { name: "dashed", delta_e: 10.0 * GAMMA, delta_p: 0.0 },
    Case { name: "dotted", delta_e: 0.0, delta_p: 2.0 * GAMMA },
];

pub const FIG4_CASES: [Case; 3] = FIG2_CASES;
pub const FIG2_KAPPA_P_OVER_KAPPA: f64 = 0.1;
pub const FIG3_COOPERATIVITY: f64 = 20.0;
pub const FIG4_COOPERATIVITIES: [f64; 3] = [1.0, 10.0, 100.0];

/// `n` points spaced evenly in `log10` from `min` to `max` inclusive.
pub fn log_space(min: f64, max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (min.log10(), max.log10());
    let last = n.saturating_sub(1).max(1) as f64;
    (0..n)
        .map(|i| match i {
            0 => min,
            _ if i + 1 == n => max,
            _ => 10f64.powf(a + (b - a) * i as f64 / last),
        })
        .collect()
}

pub fn lin_space(min: f64, max: f64, n: usize) -> Vec<f64> {
    let last = n.saturating_sub(1).max(1) as f64;
    (0..n).map(|i| if i + 1 == n && n > 1 { max } else { min + (max - min) * i as f64 / last }).collect()
}

pub fn point(cooperativity: f64, ratio: f64, kappa_p_over_kappa: f64, profile: Profile, case: &Case) -> ParamSet {
    ParamSet::new(
        SystemParams::from_cooperativity(cooperativity, KAPPA, GAMMA, ratio, case.delta_e),
        PulseSpec::new(profile, case.delta_p, kappa_p_over_kappa * KAPPA),
    )
}

fn metadata(figure: &str, quad: &Quadrature, cases: &[Case], extra: serde_json::Value) -> serde_json::Value {
    json!({
        "figure": figure,
        "gamma": GAMMA,
        "kappa": KAPPA,
        "quadrature": { "gaussian_nodes": quad.config().gaussian_nodes, "lorentzian_nodes": quad.config().lorentzian_nodes },
        "cases": cases,
        "setup": extra,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Row {
    pub cooperativity: f64,
    pub case: &'static str,
    pub f_qm: f64,
    pub f_swap: f64,
}

/// `F_qm` and `F_swap` against `C ∈ [1, 100]` at `κ_p = 0.1κ`, Gaussian.
pub fn fig2_rows(quad: &Quadrature, points: usize) -> Result<Vec<Fig2Row>, MetricsError> {
    let jobs: Vec<(Case, f64)> =
        FIG2_CASES.iter().flat_map(|case| log_space(1.0, 100.0, points).into_iter().map(move |c| (*case, c))).collect();
    jobs.par_iter()
        .map(|(case, c)| {
            let (cavity, pulse) = point(*c, 1.0, FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, case).validate()?;
            Ok(Fig2Row {
                cooperativity: *c,
                case: case.name,
                f_qm: qm_fidelity(&cavity, &pulse, quad)?,
                f_swap: swap_fidelity(&cavity, &pulse, quad)?,
            })
        })
        .collect()
}

pub fn fig2_table(quad: &Quadrature, points: usize) -> Result<CsvTable, MetricsError> {
    let setup = json!({
        "axis": { "name": "C", "scale": "log", "min": 1.0, "max": 100.0, "count": points },
        "kappa_p_over_kappa": FIG2_KAPPA_P_OVER_KAPPA,
        "base": point(1.0, 1.0, FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, &FIG2_CASES[0]),
    });
    let mut t = CsvTable::new(metadata("fig2", quad, &FIG2_CASES, setup), &["C", "case", "F_qm", "F_swap"]);
    for r in fig2_rows(quad, points)? {
        t.push(vec![num(r.cooperativity), r.case.into(), num(r.f_qm), num(r.f_swap)]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row {
    pub kappa_p_over_kappa: f64,
    pub profile: Profile,
    pub case: &'static str,
    pub f_qm: f64,
}

/// `F_qm` against `κ_p/κ ∈ [0.01, 0.5]` at `C = 20`, both profiles.
pub fn fig3_rows(quad: &Quadrature, points: usize) -> Result<Vec<Fig3Row>, MetricsError> {
    let xs = log_space(0.01, 0.5, points);
    let mut jobs = Vec::new();
    for profile in [Profile::Gaussian, Profile::Lorentzian] {
        for case in FIG3_CASES {
            jobs.extend(xs.iter().map(|&x| (profile, case, x)));
        }
    }
    jobs.par_iter()
        .map(|(profile, case, x)| {
            let (cavity, pulse) = point(FIG3_COOPERATIVITY, 1.0, *x, *profile, case).validate()?;
            Ok(Fig3Row {
                kappa_p_over_kappa: *x,
                profile: *profile,
                case: case.name,
                f_qm: qm_fidelity(&cavity, &pulse, quad)?,
            })
        })
        .collect()
}

pub fn fig3_table(quad: &Quadrature, points: usize) -> Result<CsvTable, MetricsError> {
    let setup = json!({
        "axis": { "name": "kappa_p_over_kappa", "scale": "log", "min": 0.01, "max": 0.5, "count": points },
        "cooperativity": FIG3_COOPERATIVITY,
        "base": point(FIG3_COOPERATIVITY, 1.0, 0.01, Profile::Gaussian, &FIG3_CASES[0]),
    });
    let mut t =
        CsvTable::new(metadata("fig3", quad, &FIG3_CASES, setup), &["kappa_p_over_kappa", "profile", "case", "F_qm"]);
    for r in fig3_rows(quad, points)? {
        t.push(vec![num(r.kappa_p_over_kappa), r.profile.to_string(), r.case.into(), num(r.f_qm)]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig4Row {
    pub lambda_ratio: f64,
    pub cooperativity: f64,
    pub case: &'static str,
    pub p_qm: f64,
}

/// `P_qm` at `η = 1` against `λ_L/λ_R ∈ [0.1, 10]` for `C ∈ {1, 10, 100}`.
pub fn fig4_rows(quad: &Quadrature, points: usize) -> Result<Vec<Fig4Row>, MetricsError> {
    let xs = log_space(0.1, 10.0, points);
    let mut jobs = Vec::new();
    for c in FIG4_COOPERATIVITIES {
        for case in FIG4_CASES {
            jobs.extend(xs.iter().map(|&x| (c, case, x)));
        }
    }
    jobs.par_iter()
        .map(|(c, case, ratio)| {
            let (cavity, pulse) = point(*c, *ratio, FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, case).validate()?;
            Ok(Fig4Row {
                lambda_ratio: *ratio,
                cooperativity: *c,
                case: case.name,
                p_qm: qm_success(&cavity, &pulse, quad, 1.0)?.p_qm,
            })
        })
        .collect()
}

pub fn fig4_table(quad: &Quadrature, points: usize) -> Result<CsvTable, MetricsError> {
    let setup = json!({
        "axis": { "name": "lambda_ratio", "scale": "log", "min": 0.1, "max": 10.0, "count": points },
        "cooperativities": FIG4_COOPERATIVITIES,
        "kappa_p_over_kappa": FIG2_KAPPA_P_OVER_KAPPA,
        "eta": 1.0,
        "base": point(1.0, 1.0, FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, &FIG4_CASES[0]),
    });
    let mut t = CsvTable::new(metadata("fig4", quad, &FIG4_CASES, setup), &["lambda_ratio", "C", "case", "P_qm"]);
    for r in fig4_rows(quad, points)? {
        t.push(vec![num(r.lambda_ratio), num(r.cooperativity), r.case.into(), num(r.p_qm)]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_hits_decades() {
        let xs = log_space(1.0, 100.0, 61);
        assert_eq!((xs[0], xs[30], xs[60]), (1.0, 10.0, 100.0));
        let r = log_space(0.1, 10.0, 61);
        assert_eq!(r[30], 1.0);
        assert_eq!(lin_space(-1.0, 1.0, 5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn dotted_differs_from_solid_only_in_pulse_detuning() {
        let solid = point(3.0, 1.0, 0.1, Profile::Gaussian, &FIG2_CASES[0]);
        let dotted = point(3.0, 1.0, 0.1, Profile::Gaussian, &FIG2_CASES[2]);
        assert_eq!(ParamSet { delta_p: 0.0, ..dotted }, solid);
        assert_eq!(dotted.delta_p, 0.5);
    }

    #[test]
    fn figure_tables_have_expected_shape() {
        let q = Quadrature::default();
        let t = fig2_table(&q, 5).unwrap();
        assert_eq!(t.rows.len(), 15);
        assert_eq!(t.header, vec!["C", "case", "F_qm", "F_swap"]);
        assert_eq!(fig4_table(&q, 4).unwrap().rows.len(), 36);
    }
}
