//! Single-photon quantum memory in a one-sided cavity holding a Λ-type atom:
//! scattering amplitudes, spectral averages over the pulse envelope, the
//! closed-form fidelities and probabilities, and a discretized state
//! simulation used to check them.

pub mod cli;
pub mod metrics;
pub mod params;
pub mod scattering;
pub mod spectral;
pub mod statesim;

pub use metrics::{MetricReport, MetricsError};
pub use params::{Cavity, DetectorModel, ParamError, ParamSet, Profile, PulseSpec, Qubit, SystemParams, C64};
pub use scattering::{bright_phase_factor, t_matrix, Polarization, ScatteringMatrix};
pub use spectral::{Quadrature, QuadratureConfig, SpectralGrid};
