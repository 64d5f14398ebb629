//! Randomized self-check run by the `validate` subcommand.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::figures::{fig2_rows, fig3_rows};
use crate::metrics::{qm_fidelity, qm_success, qm_success_factored};
use crate::params::{Cavity, DetectorModel, Profile, PulseSpec, Qubit, SystemParams, C64};
use crate::scattering::{bright_phase_factor, t_matrix};
use crate::spectral::Quadrature;
use crate::statesim::{compare_with_closed_form, JointState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation seen, or a count for ordering checks.
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub identity_samples: usize,
    pub oracle_trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 2024, identity_samples: 10_000, oracle_trials: 20 }
    }
}

fn check(name: &'static str, worst: f64, tolerance: f64) -> Check {
    Check { name, passed: worst <= tolerance, worst, tolerance }
}

/// Random system in the ranges used for oracle trials: `C ∈ [1, 100]`
/// (log-uniform), `δ_e ∈ [−10, 10]`, `ξ ∈ (0, π/2)`, arbitrary dipole phases,
/// `κ = 2`, `γ = 1`.
pub fn random_cavity(rng: &mut impl Rng) -> Cavity {
    let c = 10f64.powf(rng.random_range(0.0..2.0));
    let xi: f64 = rng.random_range(0.01..FRAC_PI_2 - 0.01);
    let mut p = SystemParams::from_cooperativity(c, 2.0, 1.0, xi.tan(), rng.random_range(-10.0..10.0));
    p.theta_l = rng.random_range(-PI..PI);
    p.theta_r = rng.random_range(-PI..PI);
    p.validate().expect("sampled parameters are valid")
}

/// Random pulse with `κ_p/κ ∈ [0.01, 0.3]`, `δ_p ∈ [−2, 2]` (`κ = 2`).
pub fn random_pulse(rng: &mut impl Rng, profile: Profile) -> PulseSpec {
    PulseSpec::new(profile, rng.random_range(-2.0..2.0), 2.0 * rng.random_range(0.01..0.3))
}

pub fn random_qubit(rng: &mut impl Rng) -> Qubit {
    Qubit::from_bloch(rng.random_range(0.0..PI), rng.random_range(-PI..PI))
}

/// Wider sampling for the pointwise identities, including `γ = 0`.
fn random_identity_point(rng: &mut impl Rng) -> (Cavity, f64) {
    let p = SystemParams {
        lambda_l: rng.random_range(0.0..5.0),
        lambda_r: rng.random_range(0.01..5.0),
        theta_l: rng.random_range(-PI..PI),
        theta_r: rng.random_range(-PI..PI),
        kappa: rng.random_range(0.1..5.0),
        gamma: if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.0..3.0) },
        k_c: 0.0,
        delta_e: rng.random_range(-10.0..10.0),
    };
    (p.validate().expect("sampled parameters are valid"), rng.random_range(-20.0..20.0))
}

pub fn run_suite(config: &SuiteConfig, quad: &Quadrature) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();

    let (mut det, mut tr, mut modulus, mut lossless_modulus, mut unitarity) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut mutant_breaks = 0.0f64;
    for _ in 0..config.identity_samples {
        let (c, k) = random_identity_point(&mut rng);
        let t = t_matrix(k, &c).expect("real k");
        let e = t.phase_factor;
        bump(&mut det, (t.determinant() - e).norm());
        bump(&mut tr, (t.trace() - (e + 1.0)).norm());
        bump(&mut modulus, (t.t_lr.norm() - c.sin_2xi() * ((e - 1.0) * 0.5).norm()).abs());
        let excess = (e.norm() - 1.0).max(0.0);
        if c.gamma() == 0.0 {
            bump(&mut lossless_modulus, (e.norm() - 1.0).abs());
            let col0 = t.t_ll.norm_sqr() + t.t_rl.norm_sqr() - 1.0;
            let col1 = t.t_lr.norm_sqr() + t.t_rr.norm_sqr() - 1.0;
            let cross = (t.t_ll.conj() * t.t_lr + t.t_rl.conj() * t.t_rr).norm();
            bump(&mut unitarity, col0.abs().max(col1.abs()).max(cross));
        } else {
            bump(&mut modulus, excess);
        }
        // Literal sin²(ξ²) reading of T_LL.
        let xi = c.xi();
        let mutant_ll = e * (xi * xi).sin().powi(2) + c.cos_xi().powi(2);
        let mutant_det = mutant_ll * t.t_rr - t.t_lr * t.t_rl;
        bump(&mut mutant_breaks, (mutant_det - e).norm());
    }
    checks.push(check("scattering: det T = e^{i phi}", det, 1e-12));
    checks.push(check("scattering: tr T = 1 + e^{i phi}", tr, 1e-12));
    checks.push(check("scattering: |T_LR| = sin 2xi |h|, |e^{i phi}| <= 1", modulus, 1e-12));
    checks.push(check("scattering: lossless phase factor unimodular", lossless_modulus, 1e-12));
    checks.push(check("scattering: lossless T unitary", unitarity, 1e-12));
    checks.push(Check {
        name: "mutation: literal sin^2(xi^2) breaks det T",
        passed: mutant_breaks > 1e-6,
        worst: mutant_breaks,
        tolerance: 1e-6,
    });

    let mut p_paths = 0.0f64;
    let mut ratio_inv = 0.0f64;
    for _ in 0..50 {
        let c = random_cavity(&mut rng);
        let profile = if rng.random_bool(0.5) { Profile::Gaussian } else { Profile::Lorentzian };
        let pulse = random_pulse(&mut rng, profile);
        let eta = rng.random_range(0.1..1.0);
        let direct = qm_success(&c, &pulse, quad, eta).map(|s| s.p_qm).unwrap_or(f64::NAN);
        let factored = qm_success_factored(&c, &pulse, quad, eta).unwrap_or(f64::NAN);
        bump(&mut p_paths, (direct - factored).abs());
        let f0 = qm_fidelity(&c, &pulse, quad).unwrap_or(f64::NAN);
        let mut other = *c.params();
        let lambda = c.lambda();
        let xi: f64 = rng.random_range(0.1f64.atan()..10f64.atan());
        other.lambda_l = lambda * xi.sin();
        other.lambda_r = lambda * xi.cos();
        let f1 = qm_fidelity(&other.validate().expect("valid"), &pulse, quad).unwrap_or(f64::NAN);
        bump(&mut ratio_inv, (f0 - f1).abs());
    }
    checks.push(check("metrics: P_qm direct vs factored", nan_to_inf(p_paths), 1e-12));
    checks.push(check("metrics: F_qm independent of coupling ratio", nan_to_inf(ratio_inv), 1e-12));

    let fig2_violations = fig2_rows(quad, 61)
        .map(|rows| rows.iter().filter(|r| r.f_qm < r.f_swap || !(0.0..=1.0).contains(&r.f_qm)).count() as f64)
        .unwrap_or(f64::INFINITY);
    checks.push(check("metrics: F_qm >= F_swap on the C grid", fig2_violations, 0.0));
    let fig3_violations = fig3_rows(quad, 61)
        .map(|rows| {
            let half = rows.len() / 2;
            rows[..half].iter().zip(&rows[half..]).filter(|(g, l)| g.f_qm < l.f_qm).count() as f64
        })
        .unwrap_or(f64::INFINITY);
    checks.push(check("metrics: Gaussian F_qm >= Lorentzian F_qm", fig3_violations, 0.0));

    let mut oracle = 0.0f64;
    let mut trace = 0.0f64;
    for trial in 0..config.oracle_trials {
        let c = random_cavity(&mut rng);
        let profile = if trial % 2 == 0 { Profile::Gaussian } else { Profile::Lorentzian };
        let pulse = random_pulse(&mut rng, profile);
        let input = random_qubit(&mut rng);
        match compare_with_closed_form(&c, &pulse, quad, &input, &DetectorModel::Constant(1.0)) {
            Ok((_, d)) => bump(&mut oracle, d.max_abs()),
            Err(_) => oracle = f64::INFINITY,
        }
        let grid = std::sync::Arc::new(quad.grid(&pulse).expect("valid pulse"));
        let s = JointState::prepare_input(&random_qubit(&mut rng), &input, grid);
        let norm = s.apply_scattering(&c).map(|s| s.total_norm()).unwrap_or(f64::NAN);
        bump(&mut trace, (norm - 1.0).abs());
    }
    checks.push(check("statesim: oracle matches closed forms", nan_to_inf(oracle), 1e-6));
    checks.push(check("statesim: trace preserved with loss", nan_to_inf(trace), 1e-10));

    // The phase factor does not depend on how λ is split between L and R.
    let c = random_cavity(&mut rng);
    let mut swapped = *c.params();
    std::mem::swap(&mut swapped.lambda_l, &mut swapped.lambda_r);
    let swapped = swapped.validate().expect("valid");
    let diff = (bright_phase_factor(0.3, &c).unwrap_or(C64::new(f64::NAN, 0.0))
        - bright_phase_factor(0.3, &swapped).unwrap_or(C64::new(f64::NAN, 0.0)))
    .norm();
    checks.push(check("scattering: phase factor independent of coupling split", nan_to_inf(diff), 1e-12));

    SuiteReport { seed: config.seed, checks }
}

/// Running maximum that treats NaN as an infinitely bad sample.
fn bump(worst: &mut f64, x: f64) {
    *worst = if x.is_nan() { f64::INFINITY } else { worst.max(x) };
}

fn nan_to_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}
