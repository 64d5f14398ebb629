//! Two atoms in two cavities, each hit by one photon of a polarization-
//! entangled pair `c_LR|k̄_L⟩|k̄'_R⟩ + c_RL|k̄_R⟩|k̄'_L⟩`. Both atoms start in
//! `|R⟩`; the target atomic state is `c_RL|LR⟩ + c_LR|RL⟩`.

use std::sync::Arc;

use serde::Serialize;

use super::{Result, ScatteringTable, StateSimError, ZERO};
use crate::params::{Cavity, DetectorModel, ParamError, PulseSpec, C64};
use crate::spectral::{Quadrature, SpectralGrid};

/// Largest amplitude array the dense two-photon state may allocate.
pub const MAX_AMPLITUDES: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonPair {
    pub c_lr: C64,
    pub c_rl: C64,
}

impl PhotonPair {
    pub fn new(c_lr: C64, c_rl: C64) -> std::result::Result<Self, ParamError> {
        let norm = c_lr.norm_sqr() + c_rl.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(ParamError::UnnormalizedQubit(norm));
        }
        Ok(Self { c_lr, c_rl })
    }

    pub fn bell() -> Self {
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c_lr: a, c_rl: a }
    }

    /// `|c_LR|⁴ + |c_RL|⁴`, the fidelity floor that comes from the pair
    /// weights alone.
    pub fn population_overlap(&self) -> f64 {
        self.c_lr.norm_sqr().powi(2) + self.c_rl.norm_sqr().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglementMode {
    /// No measurement; photons traced out.
    Swap,
    /// Both photons counted in `k_L` polarization.
    Postselect,
}

/// `ψ(a1, a2, p1, p2, j1, j2)` with `a`, `p` ∈ {L = 0, R = 1}.
#[derive(Debug, Clone)]
pub struct TwoCavityState {
    grid1: Arc<SpectralGrid>,
    grid2: Arc<SpectralGrid>,
    amps: Vec<C64>,
    loss_weight: f64,
}

impl TwoCavityState {
    fn index(&self, a1: usize, a2: usize, p1: usize, p2: usize, j1: usize, j2: usize) -> usize {
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        ((((a1 * 2 + a2) * 2 + p1) * 2 + p2) * n1 + j1) * n2 + j2
    }

    pub fn prepare(pair: &PhotonPair, grid1: Arc<SpectralGrid>, grid2: Arc<SpectralGrid>) -> Result<Self> {
        let size = 16 * grid1.len() * grid2.len();
        if size > MAX_AMPLITUDES {
            return Err(StateSimError::GridTooLarge(size));
        }
        let mut state = Self { grid1, grid2, amps: vec![ZERO; size], loss_weight: 0.0 };
        let (f1, f2) = (state.grid1.amplitudes().to_vec(), state.grid2.amplitudes().to_vec());
        for (j1, &a) in f1.iter().enumerate() {
            for (j2, &b) in f2.iter().enumerate() {
                let i = state.index(1, 1, 0, 1, j1, j2);
                state.amps[i] = pair.c_lr * a * b;
                let i = state.index(1, 1, 1, 0, j1, j2);
                state.amps[i] = pair.c_rl * a * b;
            }
        }
        Ok(state)
    }

    pub fn loss_weight(&self) -> f64 {
        self.loss_weight
    }

    pub fn amplitude_norm(&self) -> f64 {
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let (dk1, dk2) = (self.grid1.dk(), self.grid2.dk());
        self.amps
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let j2 = i % n2;
                let j1 = (i / n2) % n1;
                dk1[j1] * dk2[j2] * z.norm_sqr()
            })
            .sum()
    }

    pub fn total_norm(&self) -> f64 {
        self.amplitude_norm() + self.loss_weight
    }

    /// Scatters photon 1 in cavity 1 and photon 2 in cavity 2.
    pub fn apply_scattering(&self, table1: &ScatteringTable, table2: &ScatteringTable) -> Result<Self> {
        table1.check(&self.grid1)?;
        table2.check(&self.grid2)?;
        let mut out = self.clone();
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        for other_a in 0..2 {
            for other_p in 0..2 {
                for j1 in 0..n1 {
                    let t = &table1.matrices()[j1];
                    for j2 in 0..n2 {
                        let lk = out.index(0, other_a, 0, other_p, j1, j2);
                        let rk = out.index(1, other_a, 1, other_p, j1, j2);
                        let (l, r) = t.apply(out.amps[lk], out.amps[rk]);
                        out.amps[lk] = l;
                        out.amps[rk] = r;
                    }
                }
                for j2 in 0..n2 {
                    let t = &table2.matrices()[j2];
                    for j1 in 0..n1 {
                        let lk = out.index(other_a, 0, other_p, 0, j1, j2);
                        let rk = out.index(other_a, 1, other_p, 1, j1, j2);
                        let (l, r) = t.apply(out.amps[lk], out.amps[rk]);
                        out.amps[lk] = l;
                        out.amps[rk] = r;
                    }
                }
            }
        }
        if !(table1.is_lossless() && table2.is_lossless()) {
            out.loss_weight += (self.amplitude_norm() - out.amplitude_norm()).max(0.0);
        }
        Ok(out)
    }

    /// Keeps the `k_L ⊗ k'_L` component weighted by `√(η(k)η(k'))`; not
    /// renormalized.
    #[allow(clippy::needless_range_loop)]
    pub fn postselect_left(&self, detector: &DetectorModel) -> Self {
        let mut out = self.clone();
        out.loss_weight = 0.0;
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let eta1: Vec<f64> = self.grid1.nodes().iter().map(|&k| detector.efficiency(k).sqrt()).collect();
        let eta2: Vec<f64> = self.grid2.nodes().iter().map(|&k| detector.efficiency(k).sqrt()).collect();
        for a1 in 0..2 {
            for a2 in 0..2 {
                for p1 in 0..2 {
                    for p2 in 0..2 {
                        for j1 in 0..n1 {
                            for j2 in 0..n2 {
                                let i = out.index(a1, a2, p1, p2, j1, j2);
                                out.amps[i] =
                                    if p1 == 0 && p2 == 0 { out.amps[i] * (eta1[j1] * eta2[j2]) } else { ZERO };
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Two-atom density matrix in the basis `LL, LR, RL, RR`, photons traced.
    #[allow(clippy::needless_range_loop)]
    pub fn atom_density(&self) -> [[C64; 4]; 4] {
        let mut rho = [[ZERO; 4]; 4];
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let (dk1, dk2) = (self.grid1.dk(), self.grid2.dk());
        for p1 in 0..2 {
            for p2 in 0..2 {
                for j1 in 0..n1 {
                    for j2 in 0..n2 {
                        let w = dk1[j1] * dk2[j2];
                        if w == 0.0 {
                            continue;
                        }
                        let v: [C64; 4] = std::array::from_fn(|s| self.amps[self.index(s / 2, s % 2, p1, p2, j1, j2)]);
                        for x in 0..4 {
                            for y in 0..4 {
                                rho[x][y] += v[x] * v[y].conj() * w;
                            }
                        }
                    }
                }
            }
        }
        rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementOutcome {
    pub mode: EntanglementMode,
    /// Two-atom state, normalized to unit trace.
    pub density: [[C64; 4]; 4],
    /// Overlap with the target. Loss counts as failure in swap mode.
    pub fidelity: f64,
    /// Post-selection probability, or the retained (non-leaked) weight in
    /// swap mode.
    pub probability: f64,
    /// `(F − s)/(1 − s)` with `s = |c_LR|⁴ + |c_RL|⁴`, the part of the
    /// post-selected fidelity that reflects the memory itself. `None` for
    /// product inputs or in swap mode.
    pub memory_fidelity: Option<f64>,
    /// `(|[T_LR]_f|², [|T_LR|²]_f)` of cavity 1; set only when both cavities
    /// and pulses coincide.
    pub bounds: Option<(f64, f64)>,
}

impl EntanglementOutcome {
    pub fn within_bounds(&self, tol: f64) -> Option<bool> {
        self.bounds.map(|(lo, hi)| self.fidelity >= lo - tol && self.fidelity <= hi + tol)
    }
}

/// Runs the pair through both cavities and evaluates the atomic state.
pub fn entanglement_storage(
    pair: &PhotonPair,
    first: (&Cavity, &PulseSpec),
    second: (&Cavity, &PulseSpec),
    quad: &Quadrature,
    detector: &DetectorModel,
    mode: EntanglementMode,
) -> Result<EntanglementOutcome> {
    let detector = detector.clone().validate()?;
    let grid1 = Arc::new(quad.grid(first.1)?);
    let grid2 = Arc::new(quad.grid(second.1)?);
    let table1 = ScatteringTable::new(first.0, grid1.clone())?;
    let table2 = ScatteringTable::new(second.0, grid2.clone())?;

    let scattered = TwoCavityState::prepare(pair, grid1.clone(), grid2)?.apply_scattering(&table1, &table2)?;
    let kept = match mode {
        EntanglementMode::Swap => scattered,
        EntanglementMode::Postselect => scattered.postselect_left(&detector),
    };
    let mut density = kept.atom_density();
    let probability = (0..4).map(|i| density[i][i].re).sum::<f64>();
    if mode == EntanglementMode::Postselect && (probability.is_nan() || probability < super::MIN_PROBABILITY) {
        return Err(StateSimError::ZeroProbability(probability));
    }

    // target c_RL|LR⟩ + c_LR|RL⟩
    let target = [ZERO, pair.c_rl, pair.c_lr, ZERO];
    let mut overlap = ZERO;
    for x in 0..4 {
        for y in 0..4 {
            overlap += target[x].conj() * density[x][y] * target[y];
        }
    }
    let fidelity = match mode {
        EntanglementMode::Swap => overlap.re,
        EntanglementMode::Postselect => overlap.re / probability,
    };
    if probability > 0.0 {
        for z in density.iter_mut().flatten() {
            *z /= probability;
        }
    }

    let s = pair.population_overlap();
    let memory_fidelity =
        (mode == EntanglementMode::Postselect && 1.0 - s >= 1e-12).then(|| (fidelity - s) / (1.0 - s));

    let bounds = (first.0 == second.0 && first.1 == second.1).then(|| {
        let (mut mean, mut sq) = (ZERO, 0.0);
        for (t, &w) in table1.matrices().iter().zip(grid1.weights()) {
            mean += t.t_lr * w;
            sq += t.t_lr.norm_sqr() * w;
        }
        (mean.norm_sqr(), sq)
    });

    Ok(EntanglementOutcome { mode, density, fidelity, probability, memory_fidelity, bounds })
}
