//! Single-photon scattering amplitudes of a Λ-type atom in a one-sided
//! cavity: the dipole couplings, the bright-state phase factor and the
//! 2×2 transfer matrix acting on `{|L k_L⟩, |R k_R⟩}`.
//!
//! `k` is the photon wavenumber measured from the cavity resonance.

use serde::Serialize;
use thiserror::Error;

use crate::params::{Cavity, C64};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ScatteringError {
    #[error("phase-factor denominator vanishes at k = {0}")]
    DegenerateDenominator(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Polarization {
    L,
    R,
}

/// `g_pol(k) = λ_pol sqrt(κ/π) e^{iθ_pol} / (k + iκ)`.
pub fn coupling_amplitude(k: f64, cavity: &Cavity, pol: Polarization) -> C64 {
    let kappa = cavity.kappa();
    let (lambda, theta) = match pol {
        Polarization::L => (cavity.lambda_l(), cavity.theta_l()),
        Polarization::R => (cavity.lambda_r(), cavity.theta_r()),
    };
    C64::from_polar(lambda * (kappa / std::f64::consts::PI).sqrt(), theta) / C64::new(k, kappa)
}

/// The quadratic `w_±(s) = s² − (δ_e − iγ ± iκ)s − λ² ± iκ(δ_e − iγ)`.
fn w(s: f64, sign: f64, cavity: &Cavity) -> C64 {
    let lossy_detuning = C64::new(cavity.delta_e(), -cavity.gamma());
    let lambda2 = cavity.lambda() * cavity.lambda();
    let ik = I * (sign * cavity.kappa());
    s * s - (lossy_detuning + ik) * s - lambda2 + ik * lossy_detuning
}

/// Bright-state phase factor `e^{iφ_s(k)}`.
///
/// For real `k`, `κ > 0` and `γ > 0` the denominator has no real zeros; with
/// `γ = 0` the factor is unimodular and its denominator is still bounded away
/// from zero. The error only guards against pathological inputs.
pub fn bright_phase_factor(k: f64, cavity: &Cavity) -> Result<C64, ScatteringError> {
    let kappa = cavity.kappa();
    let num = C64::new(k, kappa) * w(k, 1.0, cavity);
    let den = C64::new(k, -kappa) * w(k, -1.0, cavity);
    if den.norm() < 1e-300 {
        return Err(ScatteringError::DegenerateDenominator(k));
    }
    Ok(num / den)
}

/// `(e^{iφ_s(k)} − 1)/2`, the amplitude whose spectral averages give the
/// swap and memory fidelities. At `ξ = π/4` and equal dipole phases it equals
/// `T_LR(k)`.
///
/// Evaluated as `−iκλ² / ((k − iκ) w_−(k))`, which is the same quantity
/// without the cancellation in `e^{iφ_s} − 1` at weak coupling.
pub fn half_phase_amplitude(k: f64, cavity: &Cavity) -> Result<C64, ScatteringError> {
    let kappa = cavity.kappa();
    let den = C64::new(k, -kappa) * w(k, -1.0, cavity);
    if den.norm() < 1e-300 {
        return Err(ScatteringError::DegenerateDenominator(k));
    }
    Ok(-I * (kappa * cavity.lambda() * cavity.lambda()) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringMatrix {
    pub k: f64,
    pub t_ll: C64,
    pub t_rr: C64,
    pub t_lr: C64,
    pub t_rl: C64,
    pub phase_factor: C64,
}

impl ScatteringMatrix {
    /// Acts on amplitudes `(α, β)` of `|L k_L⟩`, `|R k_R⟩`.
    pub fn apply(&self, l_kl: C64, r_kr: C64) -> (C64, C64) {
        (self.t_ll * l_kl + self.t_lr * r_kr, self.t_rl * l_kl + self.t_rr * r_kr)
    }

    pub fn determinant(&self) -> C64 {
        self.t_ll * self.t_rr - self.t_lr * self.t_rl
    }

    pub fn trace(&self) -> C64 {
        self.t_ll + self.t_rr
    }
}

pub fn t_matrix(k: f64, cavity: &Cavity) -> Result<ScatteringMatrix, ScatteringError> {
    let phase = bright_phase_factor(k, cavity)?;
    Ok(t_matrix_from_phase(k, phase, cavity))
}

pub(crate) fn t_matrix_from_phase(k: f64, phase: C64, cavity: &Cavity) -> ScatteringMatrix {
    let s = cavity.sin_xi();
    let c = cavity.cos_xi();
    let off = (phase - 1.0) * (s * c);
    let dtheta = cavity.dipole_phase_difference();
    ScatteringMatrix {
        k,
        t_ll: phase * (s * s) + c * c,
        t_rr: phase * (c * c) + s * s,
        t_lr: C64::from_polar(1.0, -dtheta) * off,
        t_rl: C64::from_polar(1.0, dtheta) * off,
        phase_factor: phase,
    }
}
