//! Discretized state-evolution oracle.
//!
//! States are kets on `atom ⊗ polarization ⊗ k-grid`, with the grid taken
//! from [`Quadrature::grid`] so oracle sums and closed-form averages share
//! one discretization. An amplitude `ψ(a, p, j)` is a wavefunction value; the
//! norm is `Σ_j dk_j |ψ(·,·,j)|²`. Photons are processed one at a time: each
//! is detected before the next one arrives, so a photon that has been
//! measured only survives as an orthogonal branch label `j`.

pub mod two_cavity;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{self, MetricsError};
use crate::params::{Cavity, DetectorModel, ParamError, PulseSpec, Qubit, C64};
use crate::scattering::{t_matrix, Polarization, ScatteringError, ScatteringMatrix};
use crate::spectral::{Quadrature, SpectralError, SpectralGrid};

pub use two_cavity::{entanglement_storage, EntanglementMode, EntanglementOutcome, PhotonPair, TwoCavityState};

const ZERO: C64 = C64::new(0.0, 0.0);
const MIN_PROBABILITY: f64 = 1e-300;

/// 2×2 atomic density matrix in the `{|L⟩, |R⟩}` basis.
pub type AtomDensity = [[C64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateSimError {
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("post-selection succeeds with probability {0:e}")]
    ZeroProbability(f64),
    #[error("scattering table was built for a different k-grid")]
    GridMismatch,
    #[error("two-cavity state would need {0} amplitudes")]
    GridTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, StateSimError>;

fn slot(p: Polarization) -> usize {
    match p {
        Polarization::L => 0,
        Polarization::R => 1,
    }
}

/// `T(k_j)` at every node of one grid.
#[derive(Debug, Clone)]
pub struct ScatteringTable {
    grid: Arc<SpectralGrid>,
    matrices: Vec<ScatteringMatrix>,
    lossless: bool,
}

impl ScatteringTable {
    pub fn new(cavity: &Cavity, grid: Arc<SpectralGrid>) -> Result<Self> {
        let matrices = grid.nodes().iter().map(|&k| t_matrix(k, cavity)).collect::<std::result::Result<_, _>>()?;
        Ok(Self { grid, matrices, lossless: cavity.gamma() == 0.0 })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn matrices(&self) -> &[ScatteringMatrix] {
        &self.matrices
    }

    pub fn is_lossless(&self) -> bool {
        self.lossless
    }

    fn check(&self, grid: &Arc<SpectralGrid>) -> Result<()> {
        if Arc::ptr_eq(&self.grid, grid) {
            Ok(())
        } else {
            Err(StateSimError::GridMismatch)
        }
    }
}

/// Atom plus one photon, `ψ(atom, polarization, j)`.
#[derive(Debug, Clone)]
pub struct JointState {
    grid: Arc<SpectralGrid>,
    /// `amps[j][atom][pol]`
    amps: Vec<[[C64; 2]; 2]>,
    loss_weight: f64,
}

impl JointState {
    /// `|ψ_a⟩ ⊗ (c_L|k̄_L⟩ + c_R|k̄_R⟩)` with the pulse envelope of `grid`.
    pub fn prepare_input(atom: &Qubit, photon: &Qubit, grid: Arc<SpectralGrid>) -> Self {
        Self::product(atom.amplitudes(), photon, grid)
    }

    /// Same as [`prepare_input`](Self::prepare_input) but with an arbitrary
    /// (unnormalized) atomic vector.
    fn product(atom: [C64; 2], photon: &Qubit, grid: Arc<SpectralGrid>) -> Self {
        let pol = photon.amplitudes();
        let amps = grid
            .amplitudes()
            .iter()
            .map(|&f| {
                let mut cell = [[ZERO; 2]; 2];
                for a in 0..2 {
                    for p in 0..2 {
                        cell[a][p] = atom[a] * pol[p] * f;
                    }
                }
                cell
            })
            .collect();
        Self { grid, amps, loss_weight: 0.0 }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn amplitude(&self, atom: Polarization, photon: Polarization, j: usize) -> C64 {
        self.amps[j][slot(atom)][slot(photon)]
    }

    pub fn loss_weight(&self) -> f64 {
        self.loss_weight
    }

    /// `Σ_j dk_j Σ_{a,p} |ψ(a,p,j)|²`.
    pub fn amplitude_norm(&self) -> f64 {
        self.amps
            .iter()
            .zip(self.grid.dk())
            .map(|(cell, &dk)| dk * cell.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn total_norm(&self) -> f64 {
        self.amplitude_norm() + self.loss_weight
    }

    /// Photon spectral density `Σ_{a,p} |ψ(a,p,j)|²` at each node.
    pub fn photon_spectrum(&self) -> Vec<f64> {
        self.amps.iter().map(|cell| cell.iter().flatten().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// Atomic density matrix with the photon traced out; its trace is the
    /// amplitude norm.
    #[allow(clippy::needless_range_loop)]
    pub fn atom_density(&self) -> AtomDensity {
        let mut rho = [[ZERO; 2]; 2];
        for (cell, &dk) in self.amps.iter().zip(self.grid.dk()) {
            for p in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        rho[a][b] += cell[a][p] * cell[b][p].conj() * dk;
                    }
                }
            }
        }
        rho
    }

    pub fn apply_scattering(&self, cavity: &Cavity) -> Result<Self> {
        let table = ScatteringTable::new(cavity, self.grid.clone())?;
        self.apply_table(&table)
    }

    /// `|L k_L⟩, |R k_R⟩` mix through `T(k_j)`; `|L k_R⟩, |R k_L⟩` pass. The
    /// norm that leaves the single-photon sector is added to `loss_weight`.
    pub fn apply_table(&self, table: &ScatteringTable) -> Result<Self> {
        table.check(&self.grid)?;
        let amps: Vec<_> = self
            .amps
            .iter()
            .zip(&table.matrices)
            .map(|(cell, t)| {
                let (l_kl, r_kr) = t.apply(cell[0][0], cell[1][1]);
                [[l_kl, cell[0][1]], [cell[1][0], r_kr]]
            })
            .collect();
        let mut out = Self { grid: self.grid.clone(), amps, loss_weight: self.loss_weight };
        if !table.lossless {
            out.loss_weight += (self.amplitude_norm() - out.amplitude_norm()).max(0.0);
        }
        Ok(out)
    }

    /// Applies `√η(k_j)` to the `pol` component and drops the rest, without
    /// renormalizing. The squared norm of the result is the click probability.
    fn filter_photon(&self, pol: Polarization, detector: &DetectorModel) -> Self {
        let p = slot(pol);
        let amps = self
            .amps
            .iter()
            .zip(self.grid.nodes())
            .map(|(cell, &k)| {
                let s = detector.efficiency(k).sqrt();
                let mut out = [[ZERO; 2]; 2];
                out[0][p] = cell[0][p] * s;
                out[1][p] = cell[1][p] * s;
                out
            })
            .collect();
        Self { grid: self.grid.clone(), amps, loss_weight: 0.0 }
    }

    /// Polarization-resolving click with efficiency `η(k)`. Returns the
    /// renormalized post-click state and the click probability.
    pub fn detect_photon(&self, pol: Polarization, detector: &DetectorModel) -> Result<(Self, f64)> {
        let mut out = self.filter_photon(pol, detector);
        let p = out.amplitude_norm();
        if p.is_nan() || p < MIN_PROBABILITY {
            return Err(StateSimError::ZeroProbability(p));
        }
        let s = 1.0 / p.sqrt();
        for cell in &mut out.amps {
            for z in cell.iter_mut().flatten() {
                *z *= s;
            }
        }
        Ok((out, p))
    }

    /// `⟨atom|` applied to the atomic factor; the photon part is kept.
    fn project_atom(&self, atom: Polarization) -> Self {
        let a = slot(atom);
        let amps = self
            .amps
            .iter()
            .map(|cell| {
                let mut out = [[ZERO; 2]; 2];
                out[a] = cell[a];
                out
            })
            .collect();
        Self { grid: self.grid.clone(), amps, loss_weight: 0.0 }
    }

    /// Orthogonal branches `(j, p)` of this state, each with its atomic vector
    /// and `dk_j` weight.
    fn branches(&self) -> impl Iterator<Item = ([C64; 2], f64)> + '_ {
        self.amps.iter().zip(self.grid.dk()).flat_map(|(cell, &dk)| {
            (0..2)
                .map(move |p| ([cell[0][p], cell[1][p]], dk))
                .filter(|(v, dk)| *dk > 0.0 && v.iter().any(|z| *z != ZERO))
        })
    }
}

/// Outcome of retrieving a stored qubit with a second `|k̄'_R⟩` photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Retrieval {
    /// Probability of finding the atom in `|L⟩` afterwards.
    pub p_l: f64,
    /// Overlap of the retrieved photon with `c_L|k̄'_L⟩ + c_R|k̄'_R⟩`.
    pub fidelity: f64,
    /// Atom after the second scattering, before the `|L⟩` projection.
    pub atom_before_projection: AtomDensity,
}

/// Scatters `|k̄'_R⟩` (the pulse of `table`) on every branch of `stored`,
/// projects the atom onto `|L⟩` and scores the photon against `target`.
pub fn retrieve(stored: &JointState, table: &ScatteringTable, target: &Qubit) -> Result<Retrieval> {
    let grid2 = table.grid().clone();
    let want: Vec<[C64; 2]> = grid2.amplitudes().iter().map(|&f| [target.l * f, target.r * f]).collect();

    let mut p_l = 0.0;
    let mut overlap_sq = 0.0;
    let mut atom_before_projection = [[ZERO; 2]; 2];
    for (atom, dk) in stored.branches() {
        let scattered = JointState::product(atom, &Qubit::R, grid2.clone()).apply_table(table)?;
        let rho = scattered.atom_density();
        for a in 0..2 {
            for b in 0..2 {
                atom_before_projection[a][b] += rho[a][b] * dk;
            }
        }
        let kept = scattered.project_atom(Polarization::L);
        p_l += dk * kept.amplitude_norm();
        let overlap: C64 = kept
            .amps
            .iter()
            .zip(&want)
            .zip(grid2.dk())
            .map(|((cell, w), &dk2)| (w[0].conj() * cell[0][0] + w[1].conj() * cell[0][1]) * dk2)
            .sum();
        overlap_sq += dk * overlap.norm_sqr();
    }
    if p_l.is_nan() || p_l < MIN_PROBABILITY {
        return Err(StateSimError::ZeroProbability(p_l));
    }
    Ok(Retrieval { p_l, fidelity: overlap_sq / p_l, atom_before_projection })
}

/// Dense density operator of a photon on `polarization ⊗ grid`, in the
/// orthonormal basis `√dk_m |p, k_m⟩`.
#[derive(Debug, Clone)]
pub struct PhotonDensity {
    dim: usize,
    data: Vec<C64>,
}

impl PhotonDensity {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// `⟨v|ρ|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mut acc = ZERO;
        for (i, vi) in v.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                acc += vi.conj() * self.get(i, j) * vj;
            }
        }
        acc
    }

    /// `c_L f(k_m)|k_L⟩ + c_R f(k_m)|k_R⟩` in the same basis.
    pub fn pulse_vector(grid: &SpectralGrid, photon: &Qubit) -> Vec<C64> {
        let n = grid.len();
        let mut v = vec![ZERO; 2 * n];
        for (m, (&f, &dk)) in grid.amplitudes().iter().zip(grid.dk()).enumerate() {
            v[m] = photon.l * f * dk.sqrt();
            v[n + m] = photon.r * f * dk.sqrt();
        }
        v
    }
}

/// The retrieved photon as a normalized density operator. Quadratic in the
/// second grid; meant for small grids.
pub fn retrieved_photon_density(stored: &JointState, table: &ScatteringTable) -> Result<PhotonDensity> {
    let grid2 = table.grid().clone();
    let n = grid2.len();
    let dim = 2 * n;
    let mut data = vec![ZERO; dim * dim];
    let mut total = 0.0;
    for (atom, dk) in stored.branches() {
        let kept =
            JointState::product(atom, &Qubit::R, grid2.clone()).apply_table(table)?.project_atom(Polarization::L);
        let mut v = vec![ZERO; dim];
        for (m, (cell, &dk2)) in kept.amps.iter().zip(grid2.dk()).enumerate() {
            v[m] = cell[0][0] * dk2.sqrt();
            v[n + m] = cell[0][1] * dk2.sqrt();
        }
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] += v[i] * v[j].conj() * dk;
            }
            total += dk * v[i].norm_sqr();
        }
    }
    if total.is_nan() || total < MIN_PROBABILITY {
        return Err(StateSimError::ZeroProbability(total));
    }
    for z in &mut data {
        *z /= total;
    }
    Ok(PhotonDensity { dim, data })
}

/// Sends `|k̄''_L⟩` (the pulse of `table`) at an atom in state `rho` and keeps
/// the branch where a `k_R` photon is counted. The result is unnormalized;
/// its trace is the success probability.
pub fn readout_unnormalized(
    rho: &AtomDensity,
    table: &ScatteringTable,
    detector: &DetectorModel,
) -> Result<AtomDensity> {
    let grid = table.grid().clone();
    let kicked: Vec<JointState> = [Qubit::L, Qubit::R]
        .iter()
        .map(|basis| {
            Ok(JointState::prepare_input(basis, &Qubit::L, grid.clone())
                .apply_table(table)?
                .filter_photon(Polarization::R, detector))
        })
        .collect::<Result<_>>()?;

    let mut out = [[ZERO; 2]; 2];
    for (j, &dk) in grid.dk().iter().enumerate() {
        // Kraus columns K_j|a⟩ for a = L, R.
        let col = |a: usize| [kicked[a].amps[j][0][1], kicked[a].amps[j][1][1]];
        let cols = [col(0), col(1)];
        for a in 0..2 {
            for b in 0..2 {
                let c = rho[a][b] * dk;
                if c == ZERO {
                    continue;
                }
                for x in 0..2 {
                    for y in 0..2 {
                        out[x][y] += cols[a][x] * c * cols[b][y].conj();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Third-photon readout of `|L⟩`: the conditioned atom and the probability.
pub fn atomic_readout(
    rho: &AtomDensity,
    table: &ScatteringTable,
    detector: &DetectorModel,
) -> Result<(AtomDensity, f64)> {
    let mut out = readout_unnormalized(rho, table, detector)?;
    let p = out[0][0].re + out[1][1].re;
    if p.is_nan() || p < MIN_PROBABILITY {
        return Err(StateSimError::ZeroProbability(p));
    }
    for z in out.iter_mut().flatten() {
        *z /= p;
    }
    Ok((out, p))
}

/// Probability that an atom in `|ψ_swap⟩ = c_R e^{iθ_R}|L⟩ − c_L e^{iθ_L}|R⟩`
/// is found after one scattering of `photon` off `atom`. Loss counts as
/// failure. Defined for any coupling ratio.
pub fn transfer_fidelity(cavity: &Cavity, grid: Arc<SpectralGrid>, atom: &Qubit, photon: &Qubit) -> Result<f64> {
    let rho = JointState::prepare_input(atom, photon, grid).apply_scattering(cavity)?.atom_density();
    let target =
        [photon.r * C64::from_polar(1.0, cavity.theta_r()), -photon.l * C64::from_polar(1.0, cavity.theta_l())];
    let mut f = ZERO;
    for a in 0..2 {
        for b in 0..2 {
            f += target[a].conj() * rho[a][b] * target[b];
        }
    }
    Ok(f.re)
}

/// Everything measured along one storage → retrieval → readout run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRecord {
    #[serde(rename = "P_kL")]
    pub p_kl: f64,
    #[serde(rename = "P_L")]
    pub p_l: f64,
    #[serde(rename = "P_qm")]
    pub p_qm: f64,
    pub fidelity: f64,
    /// Leaked weight after the storage scattering.
    pub loss_weight: f64,
    /// Third-photon readout probability for an atom prepared in `|L⟩`.
    pub readout_probability: f64,
    /// `P(k_L)` times the third-photon readout probability on the atom left
    /// by the retrieval scattering.
    #[serde(rename = "P_qm_conditional")]
    pub p_qm_conditional: f64,
}

/// Storage of `input` in an atom prepared in `|R⟩`, followed by retrieval
/// and the third-photon readout, all with the same cavity and pulse.
pub fn storage_retrieval(
    cavity: &Cavity,
    pulse: &PulseSpec,
    quad: &Quadrature,
    input: &Qubit,
    detector: &DetectorModel,
) -> Result<OracleRecord> {
    let detector = detector.clone().validate()?;
    let grid = Arc::new(quad.grid(pulse)?);
    let table = ScatteringTable::new(cavity, grid.clone())?;

    let scattered = JointState::prepare_input(&Qubit::R, input, grid).apply_table(&table)?;
    let (stored, p_kl) = scattered.detect_photon(Polarization::L, &detector)?;
    let retrieval = retrieve(&stored, &table, input)?;

    let pure_l = [[C64::new(1.0, 0.0), ZERO], [ZERO, ZERO]];
    let readout = readout_unnormalized(&pure_l, &table, &detector)?;
    let composed = readout_unnormalized(&retrieval.atom_before_projection, &table, &detector)?;

    Ok(OracleRecord {
        p_kl,
        p_l: retrieval.p_l,
        p_qm: p_kl * retrieval.p_l,
        fidelity: retrieval.fidelity,
        loss_weight: scattered.loss_weight(),
        readout_probability: readout[0][0].re + readout[1][1].re,
        p_qm_conditional: p_kl * (composed[0][0].re + composed[1][1].re),
    })
}

/// Oracle minus closed form, per quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormDeltas {
    #[serde(rename = "F_qm")]
    pub f_qm: f64,
    #[serde(rename = "P_kL")]
    pub p_kl: f64,
    #[serde(rename = "P_L")]
    pub p_l: f64,
    #[serde(rename = "P_qm")]
    pub p_qm: f64,
    #[serde(rename = "F_storage_retrieval")]
    pub f_storage_retrieval: f64,
}

impl ClosedFormDeltas {
    pub fn max_abs(&self) -> f64 {
        [self.f_qm, self.p_kl, self.p_l, self.p_qm, self.f_storage_retrieval].iter().fold(0.0, |m, d| {
            if d.is_nan() {
                f64::INFINITY
            } else {
                m.max(d.abs())
            }
        })
    }
}

/// Runs the oracle and the closed forms at one point. The oracle `F_qm` is
/// the retrieval fidelity for input `|k̄_L⟩`.
pub fn compare_with_closed_form(
    cavity: &Cavity,
    pulse: &PulseSpec,
    quad: &Quadrature,
    input: &Qubit,
    detector: &DetectorModel,
) -> Result<(OracleRecord, ClosedFormDeltas)> {
    let record = storage_retrieval(cavity, pulse, quad, input, detector)?;
    let f_qm_oracle = storage_retrieval(cavity, pulse, quad, &Qubit::L, detector)?.fidelity;
    let params = crate::params::ParamSet::new(*cavity.params(), *pulse);
    let report = metrics::MetricReport::evaluate(&params, quad, detector, input)?;
    let deltas = ClosedFormDeltas {
        f_qm: f_qm_oracle - report.f_qm,
        p_kl: record.p_kl - report.p_kl,
        p_l: record.p_l - report.p_l,
        p_qm: record.p_qm - report.p_qm,
        f_storage_retrieval: record.fidelity - report.f_storage_retrieval,
    };
    Ok((record, deltas))
}
