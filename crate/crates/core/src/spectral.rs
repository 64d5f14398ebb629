//! Photon-pulse spectral profiles and the weighted average
//! `[G]_f = ∫ |f(k)|² G(k) dk`.
//!
//! Gaussian pulses are averaged with Gauss–Hermite nodes after the
//! substitution `u = (k − k_p)/κ_p`. Lorentzian pulses use the substitution
//! `k = k_p + κ_p tan θ`, which turns the Cauchy weight into the uniform
//! measure `dθ/π` on `(−π/2, π/2)`. Spectral features of the integrand that
//! sit many widths away from the pulse peak are squeezed into thin layers at
//! `θ → ±π/2`, so the θ-integral is done with composite Gauss–Legendre
//! panels graded geometrically towards both ends.

use std::num::NonZeroUsize;
use std::sync::{Arc, OnceLock};

use gauss_quad::{hermite::GaussHermite, legendre::GaussLegendre};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{ParamError, Profile, PulseSpec, C64};

use std::f64::consts::{FRAC_PI_2, PI};

pub const DEFAULT_GAUSSIAN_NODES: usize = 64;
pub const DEFAULT_LORENTZIAN_NODES: usize = 1536;
pub const MIN_NODES: usize = 8;

/// Nodes per composite panel of the Lorentzian rule.
const PANEL_NODES: usize = 16;
/// Below this many nodes the Lorentzian rule is a single Gauss–Legendre panel.
const MIN_GRADED_NODES: usize = 64;
/// Distance from `±π/2` at which geometric grading stops; the remaining
/// sliver is one panel. Corresponds to `|k − k_p| ≈ 10⁵ κ_p`.
const GRADING_FLOOR: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("integrand is not finite at k = {0}")]
    NonFiniteIntegrand(f64),
    #[error("quadrature needs at least {MIN_NODES} nodes (got {0})")]
    TooFewNodes(usize),
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub gaussian_nodes: usize,
    pub lorentzian_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { gaussian_nodes: DEFAULT_GAUSSIAN_NODES, lorentzian_nodes: DEFAULT_LORENTZIAN_NODES }
    }
}

impl QuadratureConfig {
    /// Same node count for both profiles.
    pub fn uniform(nodes: usize) -> Self {
        Self { gaussian_nodes: nodes, lorentzian_nodes: nodes }
    }

    pub fn doubled(&self) -> Self {
        Self { gaussian_nodes: 2 * self.gaussian_nodes, lorentzian_nodes: 2 * self.lorentzian_nodes }
    }

    pub fn nodes_for(&self, profile: Profile) -> usize {
        match profile {
            Profile::Gaussian => self.gaussian_nodes,
            Profile::Lorentzian => self.lorentzian_nodes,
        }
    }
}

/// Normalized spectral amplitude `f(k)` including the `e^{i(k−k_p)x_0}` phase.
pub fn profile_amplitude(k: f64, pulse: &PulseSpec) -> C64 {
    let d = k - pulse.delta_p;
    let phase = C64::from_polar(1.0, d * pulse.x_0);
    match pulse.profile {
        Profile::Gaussian => {
            let u = d / pulse.kappa_p;
            phase * ((-0.5 * u * u).exp() / (PI.sqrt() * pulse.kappa_p).sqrt())
        }
        Profile::Lorentzian => phase * (pulse.kappa_p / PI).sqrt() / C64::new(d, pulse.kappa_p),
    }
}

/// `|f(k)|²`, evaluated without forming the complex amplitude.
pub fn profile_density(k: f64, pulse: &PulseSpec) -> f64 {
    let d = k - pulse.delta_p;
    match pulse.profile {
        Profile::Gaussian => {
            let u = d / pulse.kappa_p;
            (-u * u).exp() / (PI.sqrt() * pulse.kappa_p)
        }
        Profile::Lorentzian => pulse.kappa_p / PI / (d * d + pulse.kappa_p * pulse.kappa_p),
    }
}

/// Unit rules: Gauss–Hermite in `u` with weights normalized by `√π`, and the
/// graded Cauchy rule in `θ` with weights normalized by `π`. Both sum to one.
#[derive(Debug, Clone)]
pub struct Quadrature {
    config: QuadratureConfig,
    // Built on first use: large Hermite rules are expensive and a run often
    // needs only one profile.
    hermite: Arc<OnceLock<Vec<(f64, f64)>>>,
    cauchy: Arc<OnceLock<Vec<(f64, f64)>>>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(QuadratureConfig::default()).expect("default node counts are valid")
    }
}

impl Quadrature {
    pub fn new(config: QuadratureConfig) -> Result<Self, SpectralError> {
        for n in [config.gaussian_nodes, config.lorentzian_nodes] {
            if n < MIN_NODES {
                return Err(SpectralError::TooFewNodes(n));
            }
        }
        Ok(Self { config, hermite: Arc::default(), cauchy: Arc::default() })
    }

    pub fn config(&self) -> QuadratureConfig {
        self.config
    }

    /// Maps the unit rule for `pulse.profile` onto wavenumbers.
    pub fn grid(&self, pulse: &PulseSpec) -> Result<SpectralGrid, SpectralError> {
        let pulse = pulse.validate()?;
        let (nodes, weights): (Vec<f64>, Vec<f64>) = match pulse.profile {
            Profile::Gaussian => self
                .hermite
                .get_or_init(|| hermite_rule(self.config.gaussian_nodes))
                .iter()
                .map(|&(u, w)| (pulse.delta_p + pulse.kappa_p * u, w))
                .unzip(),
            Profile::Lorentzian => self
                .cauchy
                .get_or_init(|| cauchy_rule(self.config.lorentzian_nodes))
                .iter()
                .map(|&(t, w)| (pulse.delta_p + pulse.kappa_p * t.tan(), w))
                .unzip(),
        };
        let amplitudes: Vec<C64> = nodes.iter().map(|&k| profile_amplitude(k, &pulse)).collect();
        let dk = weights
            .iter()
            .zip(&amplitudes)
            .map(|(&w, f)| {
                let density = f.norm_sqr();
                if density > 0.0 && w > 0.0 {
                    w / density
                } else {
                    0.0
                }
            })
            .collect();
        Ok(SpectralGrid { pulse, nodes, weights, amplitudes, dk })
    }

    /// `[G]_f` for the given pulse.
    pub fn average<G>(&self, pulse: &PulseSpec, g: G) -> Result<C64, SpectralError>
    where
        G: Fn(f64) -> C64,
    {
        self.grid(pulse)?.average(g)
    }
}

fn hermite_rule(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussHermite::new(NonZeroUsize::new(n).expect("n >= MIN_NODES"));
    let norm = PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = rule.iter().map(|&(x, w)| (x, w / norm)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

fn legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("panel size is positive"));
    let mut pairs: Vec<(f64, f64)> = rule.iter().map(|&(x, w)| (x, w)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Nodes `θ_j` and weights `w_j/π` on `(−π/2, π/2)`.
fn cauchy_rule(n: usize) -> Vec<(f64, f64)> {
    if n < MIN_GRADED_NODES {
        return legendre_unit(n).into_iter().map(|(x, w)| (FRAC_PI_2 * x, FRAC_PI_2 * w / PI)).collect();
    }

    // Work on one half in u = π/2 − |θ| ∈ (0, π/2] and mirror.
    let per_side = n.div_ceil(2);
    let panels = (per_side / PANEL_NODES).max(2);
    let ratio = (GRADING_FLOOR / FRAC_PI_2).powf(1.0 / (panels - 1) as f64);
    let mut edges: Vec<f64> = (0..panels).map(|m| FRAC_PI_2 * ratio.powi(m as i32)).collect();
    edges.push(0.0);

    let base = per_side / panels;
    let extra = per_side % panels;
    let mut half = Vec::with_capacity(per_side);
    for (m, pair) in edges.windows(2).enumerate() {
        let (hi, lo) = (pair[0], pair[1]);
        let size = base + usize::from(m < extra);
        let mid = 0.5 * (hi + lo);
        let half_width = 0.5 * (hi - lo);
        for (x, w) in legendre_unit(size) {
            half.push((FRAC_PI_2 - (mid + half_width * x), half_width * w / PI));
        }
    }

    let mut rule: Vec<(f64, f64)> = half.iter().map(|&(t, w)| (-t, w)).collect();
    rule.extend(half);
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// Quadrature nodes for one pulse.
///
/// `weights` integrate against `|f(k)|² dk` (they sum to one); `dk` are the
/// plain `dk` weights, so `dk_j |f(k_j)|² = weights_j`.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pulse: PulseSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    amplitudes: Vec<C64>,
    dk: Vec<f64>,
}

impl SpectralGrid {
    pub fn pulse(&self) -> &PulseSpec {
        &self.pulse
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dk(&self) -> &[f64] {
        &self.dk
    }

    /// Fixed-order weighted sum, so repeated runs are bit-identical.
    pub fn average<G>(&self, g: G) -> Result<C64, SpectralError>
    where
        G: Fn(f64) -> C64,
    {
        let mut acc = C64::new(0.0, 0.0);
        for (&k, &w) in self.nodes.iter().zip(&self.weights) {
            let v = g(k);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(SpectralError::NonFiniteIntegrand(k));
            }
            acc += v * w;
        }
        Ok(acc)
    }

    pub fn average_real<G>(&self, g: G) -> Result<f64, SpectralError>
    where
        G: Fn(f64) -> f64,
    {
        Ok(self.average(|k| C64::new(g(k), 0.0))?.re)
    }
}

pub fn spectral_average<G>(g: G, pulse: &PulseSpec, quad: &Quadrature) -> Result<C64, SpectralError>
where
    G: Fn(f64) -> C64,
{
    quad.average(pulse, g)
}
