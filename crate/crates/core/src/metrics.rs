//! Closed-form figures of merit: swap fidelity, memory fidelity, success
//! probabilities and the state-dependent transfer fidelities.
//!
//! All of them are spectral averages of `h(k) = (e^{iφ_s(k)} − 1)/2` or of
//! `T_LR(k)`; at `ξ = π/4`, `|T_LR| = |h|`.

use serde::Serialize;
use thiserror::Error;

use crate::params::{Cavity, DetectorModel, ParamError, ParamSet, PulseSpec, Qubit, C64};
use crate::scattering::{half_phase_amplitude, t_matrix, ScatteringError};
use crate::spectral::{Quadrature, SpectralError, SpectralGrid};

/// Below this `[|h|²]_f` the pulse does not scatter and `F_qm` is `0/0`.
const MIN_SCATTERING_WEIGHT: f64 = 1e-300;
/// Relative tolerance on `|λ_L − λ_R|/λ` for the equal-coupling formulas.
pub const EQUAL_COUPLING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("the pulse does not scatter ([|h|²]_f = {0:e}); memory fidelity is undefined")]
    ZeroScatteringWeight(f64),
    #[error("formula requires lambda_L = lambda_R (relative mismatch {0:e})")]
    UnequalCouplings(f64),
}

/// The spectral averages every closed form is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `[h]_f`
    pub h_mean: C64,
    /// `[|h|²]_f`
    pub h_sq_mean: f64,
}

impl Moments {
    pub fn compute(cavity: &Cavity, grid: &SpectralGrid) -> Result<Self, MetricsError> {
        let mut h_mean = C64::new(0.0, 0.0);
        let mut h_sq_mean = 0.0;
        for (&k, &w) in grid.nodes().iter().zip(grid.weights()) {
            let h = half_phase_amplitude(k, cavity)?;
            if !(h.re.is_finite() && h.im.is_finite()) {
                return Err(SpectralError::NonFiniteIntegrand(k).into());
            }
            h_mean += h * w;
            h_sq_mean += h.norm_sqr() * w;
        }
        Ok(Self { h_mean, h_sq_mean })
    }

    pub fn qm_fidelity(&self) -> Result<f64, MetricsError> {
        if self.h_sq_mean < MIN_SCATTERING_WEIGHT {
            return Err(MetricsError::ZeroScatteringWeight(self.h_sq_mean));
        }
        Ok((self.h_mean.norm_sqr() / self.h_sq_mean).min(1.0))
    }
}

/// `[|sin(φ_s/2)|²]_f`, computed as `[|h|²]_f`. Only a transfer fidelity when
/// `λ_L = λ_R`; at other couplings it is still the building block of `P_qm`.
pub fn swap_fidelity(cavity: &Cavity, pulse: &PulseSpec, quad: &Quadrature) -> Result<f64, MetricsError> {
    let grid = quad.grid(pulse)?;
    Ok(grid.average_real(|k| half_phase_amplitude(k, cavity).map_or(f64::NAN, |h| h.norm_sqr()))?)
}

/// Narrow-pulse expansion `1 − 2κγ/λ² − (κδ_e/λ² + δ_p/κ)²`.
pub fn swap_fidelity_leading(cavity: &Cavity, pulse: &PulseSpec) -> f64 {
    let lambda2 = cavity.lambda() * cavity.lambda();
    let kappa = cavity.kappa();
    let detuning = kappa * cavity.delta_e() / lambda2 + pulse.delta_p / kappa;
    1.0 - 2.0 * kappa * cavity.gamma() / lambda2 - detuning * detuning
}

/// `F_qm = |[h]_f|² / [|h|²]_f`.
pub fn qm_fidelity(cavity: &Cavity, pulse: &PulseSpec, quad: &Quadrature) -> Result<f64, MetricsError> {
    Moments::compute(cavity, &quad.grid(pulse)?)?.qm_fidelity()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QmSuccess {
    /// `η [|T_LR|²]_f`
    pub p_qm: f64,
    /// Success probability when the atomic `|L⟩` detection is itself done by
    /// scattering a third photon: `P_qm²`.
    pub p_qm_conditional: f64,
}

/// Net success probability with a flat detector efficiency, summed directly
/// over `|T_LR(k)|²`.
pub fn qm_success(cavity: &Cavity, pulse: &PulseSpec, quad: &Quadrature, eta: f64) -> Result<QmSuccess, MetricsError> {
    DetectorModel::Constant(eta).validate()?;
    let grid = quad.grid(pulse)?;
    let t_sq = grid.average_real(|k| t_matrix(k, cavity).map_or(f64::NAN, |t| t.t_lr.norm_sqr()))?;
    let p_qm = eta * t_sq;
    Ok(QmSuccess { p_qm, p_qm_conditional: p_qm * p_qm })
}

/// `η sin²2ξ F_swap`; the factored form of [`qm_success`].
pub fn qm_success_factored(
    cavity: &Cavity,
    pulse: &PulseSpec,
    quad: &Quadrature,
    eta: f64,
) -> Result<f64, MetricsError> {
    Ok(eta * cavity.sin_2xi().powi(2) * swap_fidelity(cavity, pulse, quad)?)
}

/// `|ψ_swap⟩ = c_R e^{iθ_R}|L⟩ − c_L e^{iθ_L}|R⟩`: the atomic state an ideal
/// swap leaves behind for photon qubit `(c_L, c_R)`.
pub fn swapped_atom_state(cavity: &Cavity, photon: &Qubit) -> Qubit {
    Qubit {
        l: photon.r * C64::from_polar(1.0, cavity.theta_r()),
        r: -photon.l * C64::from_polar(1.0, cavity.theta_l()),
    }
}

/// Fidelity of the atom ending in `|ψ_swap⟩` after one scattering:
/// `F_swap + (1 − F_swap)|⟨ψ_swap|ψ_a⟩|²`. Only valid for equal couplings.
pub fn transfer_fidelity(
    cavity: &Cavity,
    pulse: &PulseSpec,
    quad: &Quadrature,
    atom: &Qubit,
    photon: &Qubit,
) -> Result<f64, MetricsError> {
    let mismatch = (cavity.lambda_l() - cavity.lambda_r()).abs() / cavity.lambda();
    if mismatch > EQUAL_COUPLING_TOL {
        return Err(MetricsError::UnequalCouplings(mismatch));
    }
    let f_swap = swap_fidelity(cavity, pulse, quad)?;
    let overlap = swapped_atom_state(cavity, photon).inner(atom).norm_sqr();
    Ok(f_swap + (1.0 - f_swap) * overlap)
}

/// Averages needed for the storage/retrieval figures under a general detector.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TransferAverages {
    /// `[T_LR]_f`
    t_mean: C64,
    /// `[|T_LR|²]_f`
    t_sq: f64,
    /// `[η]_f`
    eta: f64,
    /// `[η |T_LR|²]_f`
    eta_t_sq: f64,
    /// `[η T_LR]_f`
    eta_t: C64,
}

impl TransferAverages {
    fn compute(cavity: &Cavity, grid: &SpectralGrid, detector: &DetectorModel) -> Result<Self, MetricsError> {
        let mut acc = Self { t_mean: C64::default(), t_sq: 0.0, eta: 0.0, eta_t_sq: 0.0, eta_t: C64::default() };
        for (&k, &w) in grid.nodes().iter().zip(grid.weights()) {
            let t = t_matrix(k, cavity)?.t_lr;
            let eta = detector.efficiency(k);
            acc.t_mean += t * w;
            acc.t_sq += t.norm_sqr() * w;
            acc.eta += eta * w;
            acc.eta_t_sq += eta * t.norm_sqr() * w;
            acc.eta_t += t * (eta * w);
        }
        Ok(acc)
    }

    fn p_kl(&self, input: &Qubit) -> f64 {
        input.r.norm_sqr() * self.eta_t_sq + input.l.norm_sqr() * self.eta
    }

    /// `P(k_L) P(L)`.
    fn p_qm(&self, input: &Qubit) -> f64 {
        input.r.norm_sqr() * self.eta_t_sq + input.l.norm_sqr() * self.eta * self.t_sq
    }

    /// `[η |⟨φ_p2|φ_rtr(k)⟩|²]_f / [η ⟨φ_rtr(k)|φ_rtr(k)⟩]_f` with
    /// `⟨φ_p2|φ_rtr(k)⟩ ∝ |c_R|² T(k) + |c_L|² [T]_f`.
    fn storage_retrieval_fidelity(&self, input: &Qubit) -> Result<f64, MetricsError> {
        let (x, y) = (input.l.norm_sqr(), input.r.norm_sqr());
        let m = self.t_mean;
        let num = y * y * self.eta_t_sq + 2.0 * x * y * (self.eta_t * m.conj()).re + x * x * self.eta * m.norm_sqr();
        let den = self.p_qm(input);
        if den < MIN_SCATTERING_WEIGHT {
            return Err(MetricsError::ZeroScatteringWeight(den));
        }
        Ok((num / den).min(1.0))
    }
}

/// Fidelity of the full storage + retrieval sequence for input `c_L|k̄_L⟩ +
/// c_R|k̄_R⟩`. For a flat detector this is `F_qm + (1 − F_qm)|c_R|⁴`; a
/// tabulated efficiency is kept inside the spectral averages.
pub fn storage_retrieval_fidelity(
    cavity: &Cavity,
    pulse: &PulseSpec,
    quad: &Quadrature,
    input: &Qubit,
    detector: &DetectorModel,
) -> Result<f64, MetricsError> {
    let grid = quad.grid(pulse)?;
    match detector.constant() {
        Some(_) => {
            let f_qm = Moments::compute(cavity, &grid)?.qm_fidelity()?;
            Ok(f_qm + (1.0 - f_qm) * input.r.norm_sqr().powi(2))
        }
        None => TransferAverages::compute(cavity, &grid, detector)?.storage_retrieval_fidelity(input),
    }
}

/// `|[h]_N − [h]_{2N}|` for the profile's node count `N`.
pub fn quadrature_delta(cavity: &Cavity, pulse: &PulseSpec, quad: &Quadrature) -> Result<f64, MetricsError> {
    let fine = Quadrature::new(quad.config().doubled())?;
    let coarse = Moments::compute(cavity, &quad.grid(pulse)?)?.h_mean;
    let refined = Moments::compute(cavity, &fine.grid(pulse)?)?.h_mean;
    Ok((coarse - refined).norm())
}

/// All figures of merit at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(flatten)]
    pub params: ParamSet,
    pub eta: Option<f64>,
    pub cooperativity: Option<f64>,
    #[serde(rename = "F_swap")]
    pub f_swap: f64,
    /// `F_swap` is a transfer fidelity only at `λ_L = λ_R`.
    pub swap_meaningful: bool,
    #[serde(rename = "F_swap_leading")]
    pub f_swap_leading: f64,
    #[serde(rename = "F_qm")]
    pub f_qm: f64,
    #[serde(rename = "P_kL")]
    pub p_kl: f64,
    #[serde(rename = "P_L")]
    pub p_l: f64,
    #[serde(rename = "P_qm")]
    pub p_qm: f64,
    #[serde(rename = "P_qm_conditional")]
    pub p_qm_conditional: f64,
    #[serde(rename = "F_storage_retrieval")]
    pub f_storage_retrieval: f64,
}

impl MetricReport {
    /// Evaluates every closed form for `input` stored and retrieved.
    pub fn evaluate(
        params: &ParamSet,
        quad: &Quadrature,
        detector: &DetectorModel,
        input: &Qubit,
    ) -> Result<Self, MetricsError> {
        let (cavity, pulse) = params.validate()?;
        let detector = detector.clone().validate()?;
        let grid = quad.grid(&pulse)?;
        let moments = Moments::compute(&cavity, &grid)?;
        let averages = TransferAverages::compute(&cavity, &grid, &detector)?;

        let f_qm = moments.qm_fidelity()?;
        let p_kl = averages.p_kl(input);
        let p_qm = averages.p_qm(input);
        let p_l = if p_kl > 0.0 { p_qm / p_kl } else { 0.0 };
        let f_storage_retrieval = match detector.constant() {
            Some(_) => f_qm + (1.0 - f_qm) * input.r.norm_sqr().powi(2),
            None => averages.storage_retrieval_fidelity(input)?,
        };

        Ok(Self {
            params: *params,
            eta: detector.constant(),
            cooperativity: cavity.cooperativity().ok(),
            f_swap: moments.h_sq_mean,
            swap_meaningful: cavity.has_equal_couplings(EQUAL_COUPLING_TOL),
            f_swap_leading: swap_fidelity_leading(&cavity, &pulse),
            f_qm,
            p_kl,
            p_l,
            p_qm,
            // third-photon readout succeeds with [η |T_RL|²]_f and |T_RL| = |T_LR|
            p_qm_conditional: p_qm * averages.eta_t_sq,
            f_storage_retrieval,
        })
    }
}
