//! Physical parameters of the atom-cavity system, the photon pulse and the
//! detector, together with their validation.
//!
//! Every rate and detuning is a dimensionless multiple of a single rate unit
//! (the CLI uses the atomic decay rate, `gamma = 1`). Wavenumbers passed to
//! the library are measured from the cavity resonance, so `k = 0` is `k_c`.
//! The `k_c` field is only echoed back for display.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("`{0}` must be finite")]
    NonFiniteField(&'static str),
    #[error("`kappa` must be positive (got {0})")]
    NonPositiveKappa(f64),
    #[error("`gamma` must be non-negative (got {0})")]
    NegativeGamma(f64),
    #[error("`{field}` must be non-negative (got {value})")]
    NegativeCoupling { field: &'static str, value: f64 },
    #[error("`lambda_L` and `lambda_R` are both zero; no transition couples to the cavity")]
    ZeroCoupling,
    #[error("`gamma` is zero, the cooperativity is infinite")]
    GammaZero,
    #[error("`kappa_p` must be positive (got {0})")]
    NonPositiveWidth(f64),
    #[error("detector efficiency {value} at k = {k} is outside (0, 1]")]
    EfficiencyOutOfRange { k: f64, value: f64 },
    #[error("efficiency table is malformed: {0}")]
    BadEfficiencyTable(&'static str),
    #[error("qubit amplitudes are not normalized (norm² = {0})")]
    UnnormalizedQubit(f64),
}

fn finite(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParamError::NonFiniteField(name))
    }
}

/// Raw atom-cavity constants as read from JSON or the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    #[serde(rename = "lambda_L")]
    pub lambda_l: f64,
    #[serde(rename = "lambda_R")]
    pub lambda_r: f64,
    #[serde(rename = "theta_L", default)]
    pub theta_l: f64,
    #[serde(rename = "theta_R", default)]
    pub theta_r: f64,
    pub kappa: f64,
    pub gamma: f64,
    #[serde(default)]
    pub k_c: f64,
    #[serde(default)]
    pub delta_e: f64,
}

impl SystemParams {
    /// Parameters with a prescribed cooperativity `λ²/(κγ)` and coupling
    /// ratio `λ_L/λ_R`, dipole phases zero.
    pub fn from_cooperativity(cooperativity: f64, kappa: f64, gamma: f64, coupling_ratio: f64, delta_e: f64) -> Self {
        let lambda = (cooperativity * kappa * gamma).sqrt();
        let xi = coupling_ratio.atan();
        Self {
            lambda_l: lambda * xi.sin(),
            lambda_r: lambda * xi.cos(),
            theta_l: 0.0,
            theta_r: 0.0,
            kappa,
            gamma,
            k_c: 0.0,
            delta_e,
        }
    }

    pub fn validate(&self) -> Result<Cavity, ParamError> {
        let lambda_l = finite("lambda_L", self.lambda_l)?;
        let lambda_r = finite("lambda_R", self.lambda_r)?;
        finite("theta_L", self.theta_l)?;
        finite("theta_R", self.theta_r)?;
        let kappa = finite("kappa", self.kappa)?;
        let gamma = finite("gamma", self.gamma)?;
        finite("k_c", self.k_c)?;
        finite("delta_e", self.delta_e)?;

        if kappa <= 0.0 {
            return Err(ParamError::NonPositiveKappa(kappa));
        }
        if gamma < 0.0 {
            return Err(ParamError::NegativeGamma(gamma));
        }
        if lambda_l < 0.0 {
            return Err(ParamError::NegativeCoupling { field: "lambda_L", value: lambda_l });
        }
        if lambda_r < 0.0 {
            return Err(ParamError::NegativeCoupling { field: "lambda_R", value: lambda_r });
        }
        let lambda = lambda_l.hypot(lambda_r);
        if lambda == 0.0 {
            return Err(ParamError::ZeroCoupling);
        }
        if !lambda.is_finite() {
            return Err(ParamError::NonFiniteField("lambda_L"));
        }
        Ok(Cavity { raw: *self, lambda, sin_xi: lambda_l / lambda, cos_xi: lambda_r / lambda })
    }
}

/// Validated atom-cavity system with the derived coupling quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity {
    raw: SystemParams,
    lambda: f64,
    sin_xi: f64,
    cos_xi: f64,
}

impl Cavity {
    pub fn params(&self) -> &SystemParams {
        &self.raw
    }

    /// Total coupling `sqrt(λ_L² + λ_R²)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_l(&self) -> f64 {
        self.raw.lambda_l
    }

    pub fn lambda_r(&self) -> f64 {
        self.raw.lambda_r
    }

    /// Mixing angle with `sin ξ = λ_L/λ`, `cos ξ = λ_R/λ`, in `[0, π/2]`.
    pub fn xi(&self) -> f64 {
        self.sin_xi.atan2(self.cos_xi)
    }

    pub fn sin_xi(&self) -> f64 {
        self.sin_xi
    }

    pub fn cos_xi(&self) -> f64 {
        self.cos_xi
    }

    /// `sin 2ξ = 2 λ_L λ_R / λ²`.
    pub fn sin_2xi(&self) -> f64 {
        2.0 * self.sin_xi * self.cos_xi
    }

    pub fn kappa(&self) -> f64 {
        self.raw.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.raw.gamma
    }

    pub fn delta_e(&self) -> f64 {
        self.raw.delta_e
    }

    /// `θ_L − θ_R`.
    pub fn dipole_phase_difference(&self) -> f64 {
        self.raw.theta_l - self.raw.theta_r
    }

    pub fn theta_l(&self) -> f64 {
        self.raw.theta_l
    }

    pub fn theta_r(&self) -> f64 {
        self.raw.theta_r
    }

    /// `λ²/(κγ)`. Infinite cooperativity (`γ = 0`) is reported as an error so
    /// the caller can decide how to present it.
    pub fn cooperativity(&self) -> Result<f64, ParamError> {
        if self.raw.gamma == 0.0 {
            Err(ParamError::GammaZero)
        } else {
            Ok(self.lambda * self.lambda / (self.raw.kappa * self.raw.gamma))
        }
    }

    /// True when `|λ_L − λ_R|/λ` is below `tol`.
    pub fn has_equal_couplings(&self, tol: f64) -> bool {
        (self.raw.lambda_l - self.raw.lambda_r).abs() / self.lambda <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Gaussian,
    Lorentzian,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Gaussian => "gaussian",
            Profile::Lorentzian => "lorentzian",
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "g" => Ok(Profile::Gaussian),
            "lorentzian" | "l" => Ok(Profile::Lorentzian),
            other => Err(format!("unknown profile `{other}`")),
        }
    }
}

/// Spectral shape of a single-photon pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    #[serde(default = "default_profile")]
    pub profile: Profile,
    /// Peak detuning `k_p − k_c`.
    #[serde(default)]
    pub delta_p: f64,
    /// Spectral half-width.
    pub kappa_p: f64,
    /// Initial pulse-centre coordinate; only contributes a phase.
    #[serde(default)]
    pub x_0: f64,
}

fn default_profile() -> Profile {
    Profile::Gaussian
}

impl PulseSpec {
    pub fn new(profile: Profile, delta_p: f64, kappa_p: f64) -> Self {
        Self { profile, delta_p, kappa_p, x_0: 0.0 }
    }

    pub fn validate(&self) -> Result<Self, ParamError> {
        finite("delta_p", self.delta_p)?;
        finite("kappa_p", self.kappa_p)?;
        finite("x_0", self.x_0)?;
        if self.kappa_p <= 0.0 {
            return Err(ParamError::NonPositiveWidth(self.kappa_p));
        }
        Ok(*self)
    }
}

/// Full parameter set in the flat JSON layout used on disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    #[serde(rename = "lambda_L")]
    pub lambda_l: f64,
    #[serde(rename = "lambda_R")]
    pub lambda_r: f64,
    #[serde(rename = "theta_L", default)]
    pub theta_l: f64,
    #[serde(rename = "theta_R", default)]
    pub theta_r: f64,
    pub kappa: f64,
    pub gamma: f64,
    #[serde(default)]
    pub k_c: f64,
    #[serde(default)]
    pub delta_e: f64,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    #[serde(default)]
    pub delta_p: f64,
    pub kappa_p: f64,
    #[serde(default)]
    pub x_0: f64,
}

impl ParamSet {
    pub fn new(system: SystemParams, pulse: PulseSpec) -> Self {
        Self {
            lambda_l: system.lambda_l,
            lambda_r: system.lambda_r,
            theta_l: system.theta_l,
            theta_r: system.theta_r,
            kappa: system.kappa,
            gamma: system.gamma,
            k_c: system.k_c,
            delta_e: system.delta_e,
            profile: pulse.profile,
            delta_p: pulse.delta_p,
            kappa_p: pulse.kappa_p,
            x_0: pulse.x_0,
        }
    }

    pub fn system(&self) -> SystemParams {
        SystemParams {
            lambda_l: self.lambda_l,
            lambda_r: self.lambda_r,
            theta_l: self.theta_l,
            theta_r: self.theta_r,
            kappa: self.kappa,
            gamma: self.gamma,
            k_c: self.k_c,
            delta_e: self.delta_e,
        }
    }

    pub fn pulse(&self) -> PulseSpec {
        PulseSpec { profile: self.profile, delta_p: self.delta_p, kappa_p: self.kappa_p, x_0: self.x_0 }
    }

    pub fn validate(&self) -> Result<(Cavity, PulseSpec), ParamError> {
        Ok((self.system().validate()?, self.pulse().validate()?))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("flat struct of numbers serializes")
    }
}

/// Photon-detector efficiency, either flat or a piecewise-linear table in
/// `k` (clamped to the end values outside the table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorModel {
    Constant(f64),
    Tabulated { k: Vec<f64>, eta: Vec<f64> },
}

impl Default for DetectorModel {
    fn default() -> Self {
        DetectorModel::Constant(1.0)
    }
}

impl DetectorModel {
    pub fn validate(self) -> Result<Self, ParamError> {
        match &self {
            DetectorModel::Constant(eta) => {
                if !(*eta > 0.0 && *eta <= 1.0) {
                    return Err(ParamError::EfficiencyOutOfRange { k: f64::NAN, value: *eta });
                }
            }
            DetectorModel::Tabulated { k, eta } => {
                if k.is_empty() || k.len() != eta.len() {
                    return Err(ParamError::BadEfficiencyTable("k and eta must be non-empty and equally long"));
                }
                if k.iter().any(|x| !x.is_finite()) || k.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ParamError::BadEfficiencyTable("k must be finite and strictly increasing"));
                }
                if let Some((&kk, &e)) = k.iter().zip(eta).find(|(_, &e)| !(e > 0.0 && e <= 1.0)) {
                    return Err(ParamError::EfficiencyOutOfRange { k: kk, value: e });
                }
            }
        }
        Ok(self)
    }

    /// The constant efficiency, if this model has one.
    pub fn constant(&self) -> Option<f64> {
        match self {
            DetectorModel::Constant(eta) => Some(*eta),
            DetectorModel::Tabulated { .. } => None,
        }
    }

    pub fn efficiency(&self, k: f64) -> f64 {
        match self {
            DetectorModel::Constant(eta) => *eta,
            DetectorModel::Tabulated { k: ks, eta } => {
                let last = ks.len() - 1;
                if k <= ks[0] {
                    return eta[0];
                }
                if k >= ks[last] {
                    return eta[last];
                }
                let hi = ks.partition_point(|&x| x <= k);
                let lo = hi - 1;
                let t = (k - ks[lo]) / (ks[hi] - ks[lo]);
                eta[lo] + t * (eta[hi] - eta[lo])
            }
        }
    }
}

/// Two-level polarization/ground-state qubit `a_L|L⟩ + a_R|R⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Qubit {
    pub l: C64,
    pub r: C64,
}

pub type AtomQubit = Qubit;
pub type PhotonQubit = Qubit;

impl Qubit {
    pub const L: Qubit = Qubit { l: C64::new(1.0, 0.0), r: C64::new(0.0, 0.0) };
    pub const R: Qubit = Qubit { l: C64::new(0.0, 0.0), r: C64::new(1.0, 0.0) };

    /// Checked constructor; amplitudes must already be normalized to 1e-10.
    pub fn new(l: C64, r: C64) -> Result<Self, ParamError> {
        let norm = l.norm_sqr() + r.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(ParamError::UnnormalizedQubit(norm));
        }
        Ok(Self { l, r })
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(l: C64, r: C64) -> Result<Self, ParamError> {
        let norm = (l.norm_sqr() + r.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(ParamError::UnnormalizedQubit(norm * norm));
        }
        Ok(Self { l: l / norm, r: r / norm })
    }

    /// Bloch-sphere parametrisation `cos(θ/2)|L⟩ + e^{iφ} sin(θ/2)|R⟩`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self { l: C64::new((theta / 2.0).cos(), 0.0), r: C64::from_polar((theta / 2.0).sin(), phi) }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.l, self.r]
    }

    pub fn inner(&self, other: &Qubit) -> C64 {
        self.l.conj() * other.l + self.r.conj() * other.r
    }

    pub fn scaled(&self, phase: C64) -> Qubit {
        Qubit { l: self.l * phase, r: self.r * phase }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn base() -> SystemParams {
        SystemParams {
            lambda_l: 1.0,
            lambda_r: 1.0,
            theta_l: 0.0,
            theta_r: 0.0,
            kappa: 2.0,
            gamma: 1.0,
            k_c: 0.0,
            delta_e: 0.0,
        }
    }

    #[test]
    fn equal_couplings_give_quarter_pi() {
        let lam = 3.0_f64;
        let p = SystemParams { lambda_l: lam / 2f64.sqrt(), lambda_r: lam / 2f64.sqrt(), ..base() };
        let c = p.validate().unwrap();
        assert!((c.xi() - FRAC_PI_4).abs() < 1e-15);
        assert!((c.lambda() - lam).abs() < 1e-14);
    }

    #[test]
    fn decoupled_left_transition_gives_zero_xi() {
        let c = SystemParams { lambda_l: 0.0, lambda_r: 1.0, ..base() }.validate().unwrap();
        assert_eq!(c.xi(), 0.0);
        assert_eq!(c.sin_2xi(), 0.0);
    }

    #[test]
    fn rejects_bad_fields() {
        assert_eq!(SystemParams { kappa: 0.0, ..base() }.validate(), Err(ParamError::NonPositiveKappa(0.0)));
        assert_eq!(SystemParams { gamma: -1.0, ..base() }.validate(), Err(ParamError::NegativeGamma(-1.0)));
        assert_eq!(SystemParams { lambda_l: 0.0, lambda_r: 0.0, ..base() }.validate(), Err(ParamError::ZeroCoupling));
        assert_eq!(SystemParams { delta_e: f64::NAN, ..base() }.validate(), Err(ParamError::NonFiniteField("delta_e")));
        assert!(matches!(
            SystemParams { lambda_r: -1.0, ..base() }.validate(),
            Err(ParamError::NegativeCoupling { field: "lambda_R", .. })
        ));
    }

    #[test]
    fn cooperativity_values() {
        let p = SystemParams { lambda_l: 20f64.sqrt(), lambda_r: 0.0, kappa: 2.0, gamma: 1.0, ..base() };
        assert!((p.validate().unwrap().cooperativity().unwrap() - 10.0).abs() < 1e-12);

        let fig3 = SystemParams::from_cooperativity(20.0, 2.0, 1.0, 1.0, 0.0);
        assert!((fig3.validate().unwrap().cooperativity().unwrap() - 20.0).abs() < 1e-12);

        let lossless = SystemParams { gamma: 0.0, ..base() }.validate().unwrap();
        assert_eq!(lossless.cooperativity(), Err(ParamError::GammaZero));
    }

    #[test]
    fn validate_is_idempotent() {
        let p = SystemParams { lambda_l: 0.3, lambda_r: 2.0, theta_l: 0.4, delta_e: -1.5, ..base() };
        let once = p.validate().unwrap();
        let twice = once.params().validate().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn json_uses_flat_field_names_and_rejects_unknown_keys() {
        let text = r#"{"lambda_L":1.0,"lambda_R":2.0,"kappa":2,"gamma":1,"profile":"lorentzian","kappa_p":0.2}"#;
        let set = ParamSet::from_json(text).unwrap();
        assert_eq!(set.profile, Profile::Lorentzian);
        assert_eq!(set.lambda_r, 2.0);
        assert_eq!(set.theta_l, 0.0);
        let back = ParamSet::from_json(&set.to_json()).unwrap();
        assert_eq!(back, set);

        let bad = r#"{"lambda_L":1.0,"lambda_R":2.0,"kappa":2,"gamma":1,"kappa_p":0.2,"tau":3}"#;
        assert!(ParamSet::from_json(bad).is_err());
    }

    #[test]
    fn detector_table_interpolates_and_clamps() {
        let d = DetectorModel::Tabulated { k: vec![-1.0, 1.0], eta: vec![0.5, 1.0] }.validate().unwrap();
        assert_eq!(d.efficiency(-5.0), 0.5);
        assert_eq!(d.efficiency(5.0), 1.0);
        assert!((d.efficiency(0.0) - 0.75).abs() < 1e-15);
        assert!(DetectorModel::Constant(0.0).validate().is_err());
        assert!(DetectorModel::Tabulated { k: vec![1.0, 0.0], eta: vec![1.0, 1.0] }.validate().is_err());
    }

    #[test]
    fn qubit_constructors() {
        assert!(Qubit::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).is_err());
        let q = Qubit::normalized(C64::new(1.0, 0.0), C64::new(0.0, 1.0)).unwrap();
        assert!((q.inner(&q).re - 1.0).abs() < 1e-15);
        let b = Qubit::from_bloch(1.1, -0.3);
        assert!((b.inner(&b).re - 1.0).abs() < 1e-15);
    }
}
